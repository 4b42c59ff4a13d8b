//! Grid-point orchestration with per-point checkpoint files.
//!
//! Each completed point is written to `<out>/<command>.ckpt/point-NNNNN.csv`
//! through a temporary file and a rename, next to a `config_hash` file. A
//! resumed run skips every point whose file exists and refuses to touch a
//! checkpoint written under a different hash. The final CSV is assembled from
//! the point files in grid order.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::config::RunConfig;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub resume: bool,
    /// Stop once this many new points have completed.
    pub stop_after: Option<usize>,
}

/// One command's grid: labels for logging, CSV columns and header metadata.
pub struct Sweep {
    pub command: &'static str,
    pub columns: &'static [&'static str],
    pub labels: Vec<String>,
    /// `(name, values)` pairs recorded as `# grid` lines.
    pub grids: Vec<(&'static str, Vec<f64>)>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub csv: PathBuf,
    pub computed: usize,
    pub reused: usize,
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

fn point_path(dir: &Path, i: usize) -> PathBuf {
    dir.join(format!("point-{i:05}.csv"))
}

fn header(cfg: &RunConfig, sweep: &Sweep, hash: &str) -> String {
    let mut h = format!("# floquet {VERSION} {}\n# config_hash: {hash}\n", sweep.command);
    h += &format!("# model: L={} J={} h={} g={} k={}\n", cfg.l, cfg.j, cfg.h, cfg.g, cfg.k);
    for (name, values) in &sweep.grids {
        let v: Vec<String> = values.iter().map(|x| num(*x)).collect();
        h += &format!("# grid {name}: {}\n", v.join(","));
    }
    for n in &sweep.notes {
        h += &format!("# {n}\n");
    }
    h += &sweep.columns.join(",");
    h.push('\n');
    h
}

/// Prepare the checkpoint directory; returns it.
fn open_checkpoint(cfg: &RunConfig, command: &str, hash: &str, resume: bool) -> Result<PathBuf, CliError> {
    let dir = cfg.out.join(format!("{command}.ckpt"));
    let hash_file = dir.join("config_hash");
    if dir.exists() {
        if resume {
            let stored = fs::read_to_string(&hash_file).unwrap_or_default();
            if stored.trim() != hash {
                return Err(CliError::Config(format!(
                    "checkpoint in {} was written under config hash {}, current hash is {hash}",
                    dir.display(),
                    stored.trim()
                )));
            }
            return Ok(dir);
        }
        fs::remove_dir_all(&dir)?;
    }
    fs::create_dir_all(&dir)?;
    write_atomic(&hash_file, format!("{hash}\n").as_bytes())?;
    Ok(dir)
}

/// Run `point(i)` for every grid index not already checkpointed.
///
/// `point` returns CSV rows without trailing newlines. Failures are logged
/// and skipped; the CSV then holds the completed points only and the result
/// is [`CliError::Partial`].
pub fn run<F>(cfg: &RunConfig, opts: &RunOptions, sweep: &Sweep, point: F) -> Result<Report, CliError>
where
    F: Fn(usize) -> Result<Vec<String>, CliError> + Sync,
{
    let hash = cfg.hash(sweep.command)?;
    fs::create_dir_all(&cfg.out)?;
    let dir = open_checkpoint(cfg, sweep.command, &hash, opts.resume)?;
    let total = sweep.labels.len();
    let pending: Vec<usize> = (0..total).filter(|&i| !point_path(&dir, i).exists()).collect();
    let reused = total - pending.len();

    let started = AtomicUsize::new(0);
    let failed = AtomicUsize::new(0);
    let write_lock = Mutex::new(());
    let limit = opts.stop_after.unwrap_or(usize::MAX);
    let task = |i: usize| {
        if started.fetch_add(1, Ordering::SeqCst) >= limit {
            return;
        }
        match point(i) {
            Ok(rows) => {
                let mut body = rows.join("\n");
                body.push('\n');
                let _guard = write_lock.lock().unwrap_or_else(|e| e.into_inner());
                if let Err(e) = write_atomic(&point_path(&dir, i), body.as_bytes()) {
                    eprintln!("{} [{}]: checkpoint write failed: {e}", sweep.command, sweep.labels[i]);
                    failed.fetch_add(1, Ordering::SeqCst);
                }
            }
            Err(e) => {
                eprintln!("{} [{}]: {e}", sweep.command, sweep.labels[i]);
                failed.fetch_add(1, Ordering::SeqCst);
            }
        }
    };
    dispatch(cfg.workers, &pending, task)?;

    let computed = pending.len().min(limit);
    if computed < pending.len() {
        return Err(CliError::Interrupted(computed));
    }
    let mut csv = header(cfg, sweep, &hash);
    for i in 0..total {
        if let Ok(rows) = fs::read_to_string(point_path(&dir, i)) {
            csv += &rows;
        }
    }
    let path = cfg.out.join(format!("{}.csv", sweep.command));
    write_atomic(&path, csv.as_bytes())?;
    let failed = failed.into_inner();
    if failed > 0 {
        return Err(CliError::Partial { failed, total });
    }
    Ok(Report {
        csv: path,
        computed,
        reused,
    })
}

/// Round-trip formatting; exponent form outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[cfg(feature = "parallel")]
fn dispatch<F: Fn(usize) + Sync>(workers: usize, items: &[usize], task: F) -> Result<(), CliError> {
    use rayon::prelude::*;
    if workers <= 1 {
        items.iter().for_each(|&i| task(i));
        return Ok(());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    pool.install(|| items.par_iter().for_each(|&i| task(i)));
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn dispatch<F: Fn(usize) + Sync>(_workers: usize, items: &[usize], task: F) -> Result<(), CliError> {
    items.iter().for_each(|&i| task(i));
    Ok(())
}
