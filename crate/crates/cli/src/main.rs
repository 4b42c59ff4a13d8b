use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use floquet_cli::{execute, selftest, CliError, Command, Overrides, RunConfig, RunOptions};

#[derive(Parser)]
#[command(name = "floquet", version, about = "Kicked Ising Floquet sweeps and figure data")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Time-averaged fidelity of the effective ground state over (tau, sigma).
    FidelitySweep(Common),
    /// Long-time fidelity rate for every effective eigenstate.
    EigenstateScan(Common),
    /// Quasienergies against tau with magnetization and overlap channels.
    QuasienergyMap(Common),
    /// Exact against golden-rule fidelity for the deformed drive.
    FgrCompare(Common),
    /// Broadened spectral functions of the drive operator.
    SpectralFunction(Common),
    /// Perturbative fidelity from the one-cycle correction unitary.
    PertFidelity(Common),
    /// Internal consistency checks.
    Selftest(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    resume: bool,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Comma list and/or start:stop:step ranges.
    #[arg(long)]
    tau_grid: Option<String>,
    #[arg(long)]
    sigma_grid: Option<String>,
    #[arg(long)]
    eps_grid: Option<String>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Stop after this many newly completed points.
    #[arg(long, hide = true)]
    stop_after: Option<usize>,
}

impl Common {
    fn config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.apply(&Overrides {
            l: self.l,
            k: self.k,
            tau_grid: self.tau_grid.clone(),
            sigma_grid: self.sigma_grid.clone(),
            eps_grid: self.eps_grid.clone(),
            out: self.out.clone(),
            workers: self.workers,
            n_max: self.n_max,
        })?;
        Ok(cfg)
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            resume: self.resume,
            stop_after: self.stop_after,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (cmd, common) = match &cli.command {
        Cmd::FidelitySweep(c) => (Command::FidelitySweep, c),
        Cmd::EigenstateScan(c) => (Command::EigenstateScan, c),
        Cmd::QuasienergyMap(c) => (Command::QuasienergyMap, c),
        Cmd::FgrCompare(c) => (Command::FgrCompare, c),
        Cmd::SpectralFunction(c) => (Command::SpectralFunction, c),
        Cmd::PertFidelity(c) => (Command::PertFidelity, c),
        Cmd::Selftest(c) => {
            let checks = selftest(&c.config()?)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in &checks {
                println!("{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if failed > 0 {
                return Err(CliError::Partial {
                    failed,
                    total: checks.len(),
                });
            }
            return Ok(());
        }
    };
    let report = execute(cmd, &common.config()?, &common.options())?;
    eprintln!(
        "{}: {} points computed, {} reused -> {}",
        cmd.name(),
        report.computed,
        report.reused,
        report.csv.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
