//! Run configuration: a TOML file whose keys can be overridden by flags.

use std::path::{Path, PathBuf};

use floquet_core::spectral::sector::DENSE_SECTOR_MAX_SITES;
use floquet_core::state::MAX_STATE_SITES;
use floquet_core::ModelParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::grid::{parse_grid, zoom_grid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Initial {
    /// Ground state of the truncated effective Hamiltonian of order `2k`.
    #[default]
    Ground,
    /// Eigenstate `eigenstate` of the same Hamiltonian (`L <= 16`).
    Eigenstate,
    /// Full-space amplitudes read from `snapshot`.
    Snapshot,
}

/// Fine `tau` window around `center`, used by the quasienergy map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Zoom {
    pub center: f64,
    pub width: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub l: usize,
    pub j: f64,
    pub h: f64,
    pub g: f64,
    pub k: usize,
    pub tau_grid: Option<Vec<f64>>,
    pub sigma_grid: Option<Vec<f64>>,
    pub eps_grid: Option<Vec<f64>>,
    pub initial: Initial,
    pub eigenstate: usize,
    pub snapshot: Option<PathBuf>,
    /// Cycles per trace; defaults to what the largest `sigma` requires.
    pub n_max: Option<usize>,
    pub zoom: Option<Zoom>,
    pub out: PathBuf,
    pub workers: usize,
    /// Only used by the random-state checks of `selftest`.
    pub seed: u64,
    /// Memory ceiling for the up-front budget check; defaults to the
    /// available system memory.
    pub memory_budget_mb: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            l: 12,
            j: 1.0,
            h: 1.0,
            g: 1.0,
            k: 1,
            tau_grid: None,
            sigma_grid: None,
            eps_grid: None,
            initial: Initial::Ground,
            eigenstate: 0,
            snapshot: None,
            n_max: None,
            zoom: None,
            out: PathBuf::from("out"),
            workers: 1,
            seed: 0,
            memory_budget_mb: None,
        }
    }
}

/// Flag values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub l: Option<usize>,
    pub k: Option<usize>,
    pub tau_grid: Option<String>,
    pub sigma_grid: Option<String>,
    pub eps_grid: Option<String>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub n_max: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(l) = o.l {
            self.l = l;
        }
        if let Some(k) = o.k {
            self.k = k;
        }
        if let Some(s) = &o.tau_grid {
            self.tau_grid = Some(parse_grid(s)?);
        }
        if let Some(s) = &o.sigma_grid {
            self.sigma_grid = Some(parse_grid(s)?);
        }
        if let Some(s) = &o.eps_grid {
            self.eps_grid = Some(parse_grid(s)?);
        }
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
        if let Some(w) = o.workers {
            self.workers = w;
        }
        if let Some(n) = o.n_max {
            self.n_max = Some(n);
        }
        Ok(())
    }

    pub fn params(&self, tau: f64) -> Result<ModelParams, CliError> {
        ModelParams::new(self.l, tau)
            .and_then(|p| p.with_couplings(self.j, self.h, self.g))
            .map_err(|e| CliError::Config(e.to_string()))
    }

    /// `tau` values: the zoom window if given, else the grid, else `default`.
    pub fn taus(&self, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let taus = match (&self.zoom, &self.tau_grid) {
            (Some(z), _) => zoom_grid(z)?,
            (None, Some(g)) => g.clone(),
            (None, None) => default.to_vec(),
        };
        if taus.is_empty() {
            return Err(CliError::Config("tau grid is empty".into()));
        }
        if let Some(t) = taus.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(CliError::Config(format!("tau={t} must be positive")));
        }
        Ok(taus)
    }

    pub fn sigmas(&self, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let s = self.sigma_grid.clone().unwrap_or_else(|| default.to_vec());
        if s.is_empty() {
            return Err(CliError::Config("sigma grid is empty".into()));
        }
        if let Some(x) = s.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(CliError::Config(format!("sigma={x} must be positive")));
        }
        Ok(s)
    }

    pub fn epsilons(&self, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let e = self.eps_grid.clone().unwrap_or_else(|| default.to_vec());
        if e.is_empty() {
            return Err(CliError::Config("eps grid is empty".into()));
        }
        if let Some(x) = e.iter().find(|x| !x.is_finite()) {
            return Err(CliError::Config(format!("eps={x}")));
        }
        Ok(e)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params(1.0)?;
        if self.k > 1 {
            return Err(CliError::Config(format!("k={} (supported: 0, 1)", self.k)));
        }
        if self.workers == 0 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        match self.initial {
            Initial::Eigenstate if self.l > DENSE_SECTOR_MAX_SITES => {
                return Err(CliError::Config(format!(
                    "initial = \"eigenstate\" needs the full spectrum, L={} > {DENSE_SECTOR_MAX_SITES}",
                    self.l
                )));
            }
            Initial::Snapshot if self.snapshot.is_none() => {
                return Err(CliError::Config("initial = \"snapshot\" needs a snapshot path".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// Reject `L` above a command's limit.
    pub fn require_max_l(&self, max: usize, what: &str) -> Result<(), CliError> {
        if self.l > max {
            return Err(CliError::Config(format!(
                "{what} supports L <= {max}, got L={}",
                self.l
            )));
        }
        Ok(())
    }

    /// Check `workers x vectors x 2^L x 16` bytes against the budget.
    pub fn check_memory(&self, vectors_per_point: u64) -> Result<(), CliError> {
        if self.l > MAX_STATE_SITES {
            return Err(CliError::Config(format!("L={} exceeds {MAX_STATE_SITES}", self.l)));
        }
        let need = self.workers as u64 * vectors_per_point * (1u64 << self.l) * 16;
        let budget = self
            .memory_budget_mb
            .map(|mb| mb << 20)
            .or_else(available_memory)
            .unwrap_or(u64::MAX);
        if need > budget {
            return Err(CliError::Config(format!(
                "memory budget: {} workers at L={} need {} MiB, budget {} MiB",
                self.workers,
                self.l,
                need >> 20,
                budget >> 20
            )));
        }
        Ok(())
    }

    /// SHA-256 over the command and every key that affects results.
    pub fn hash(&self, command: &str) -> Result<String, CliError> {
        let mut keyed = self.clone();
        keyed.out = PathBuf::new();
        keyed.workers = 1;
        keyed.memory_budget_mb = None;
        let text = toml::to_string(&keyed).map_err(|e| CliError::Config(e.to_string()))?;
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update(b"\n");
        h.update(text.as_bytes());
        if let (Initial::Snapshot, Some(path)) = (self.initial, &self.snapshot) {
            let bytes = std::fs::read(path)
                .map_err(|e| CliError::Config(format!("cannot read snapshot {}: {e}", path.display())))?;
            h.update(&bytes);
        }
        Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
    }
}

fn available_memory() -> Option<u64> {
    let info = std::fs::read_to_string("/proc/meminfo").ok()?;
    let line = info.lines().find(|l| l.starts_with("MemAvailable:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}
