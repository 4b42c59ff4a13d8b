//! One function per subcommand; each maps a config onto a grid sweep.

use faer::Mat;
use floquet_core::fgr::{
    fgr_fidelity, fgr_rates_from, mid_spectrum_index, perturbative_fidelity, spectral_function, DeformedSystem,
    DELTA_PER_SITE, FGR_MAX_SITES,
};
use floquet_core::fidelity::{infinite_time_fidelity, required_n_max, time_averaged_fidelity, DSigmaKernel};
use floquet_core::linalg::fold_angle;
use floquet_core::pauli::bch::magnus_truncation;
use floquet_core::pauli::model::{build_drive_k, build_h0};
use floquet_core::spectral::floquet::DELTA_U_MAX_SITES;
use floquet_core::spectral::sector::DENSE_SECTOR_MAX_SITES;
use floquet_core::spectral::{
    delta_u_matrix, eigensystem_effective, EffectiveSpectrum, FloquetEigensystem, SectorFloquetBuilder, Want,
};
use floquet_core::state::floquet::evolve_fidelity;
use floquet_core::{Exec, FloquetStepPlan, ModelParams, Propagator, SectorBasis, StateVector};

use crate::config::{Initial, RunConfig};
use crate::error::CliError;
use crate::sweep::{self, num, Report, RunOptions, Sweep};

/// Full-space vectors alive per fidelity-sweep point.
pub const VECTORS_PER_POINT: u64 = 6;

/// Largest `L` for which the fidelity sweep adds the `sigma = inf` row.
pub const INFINITE_SIGMA_MAX_SITES: usize = 14;

pub const DEFAULT_SWEEP_TAUS: [f64; 4] = [0.5, 0.9, 1.1, 1.3];
pub const DEFAULT_SIGMAS: [f64; 3] = [1e2, 1e3, 1e4];
pub const DEFAULT_SCAN_TAUS: [f64; 2] = [0.5, 1.2];
pub const DEFAULT_FGR_TAUS: [f64; 3] = [0.9, 1.1, 1.3];
pub const DEFAULT_EPSILONS: [f64; 4] = [0.1, 0.3, 0.5, 0.75];
pub const DEFAULT_FGR_N_MAX: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    FidelitySweep,
    EigenstateScan,
    QuasienergyMap,
    FgrCompare,
    SpectralFunction,
    PertFidelity,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::FidelitySweep => "fidelity-sweep",
            Command::EigenstateScan => "eigenstate-scan",
            Command::QuasienergyMap => "quasienergy-map",
            Command::FgrCompare => "fgr-compare",
            Command::SpectralFunction => "spectral-function",
            Command::PertFidelity => "pert-fidelity",
        }
    }
}

pub fn execute(cmd: Command, cfg: &RunConfig, opts: &RunOptions) -> Result<Report, CliError> {
    cfg.validate()?;
    match cmd {
        Command::FidelitySweep => fidelity_sweep(cfg, opts),
        Command::EigenstateScan => eigenstate_scan(cfg, opts),
        Command::QuasienergyMap => quasienergy_map(cfg, opts),
        Command::FgrCompare => fgr_compare(cfg, opts),
        Command::SpectralFunction => spectral(cfg, opts),
        Command::PertFidelity => pert_fidelity(cfg, opts),
    }
}

fn labels(taus: &[f64]) -> Vec<String> {
    taus.iter().map(|t| format!("tau={t}")).collect()
}

/// Initial state for a time-domain run, with sector coordinates when known.
pub struct PreparedState {
    pub state: StateVector,
    pub sector: Option<Vec<f64>>,
}

pub fn initial_state(cfg: &RunConfig, p: &ModelParams, basis: Option<&SectorBasis>) -> Result<PreparedState, CliError> {
    let sector_vector = |want: Want, j: usize| -> Result<Vec<f64>, CliError> {
        let basis = basis.ok_or_else(|| CliError::Config("sector basis unavailable".into()))?;
        let hf = magnus_truncation(p, cfg.k)?;
        let pairs = eigensystem_effective(&hf, basis, want)?;
        pairs.into_iter().nth(j).map(|e| e.vector).ok_or_else(|| {
            CliError::Config(format!(
                "eigenstate {j} outside the sector of dimension {}",
                basis.dim()
            ))
        })
    };
    let sector = match cfg.initial {
        Initial::Ground => Some(sector_vector(Want::GroundOnly, 0)?),
        Initial::Eigenstate => Some(sector_vector(Want::Full, cfg.eigenstate)?),
        Initial::Snapshot => None,
    };
    let state = match (&sector, &cfg.snapshot) {
        (Some(v), _) => basis.expect("sector basis").lift(v)?,
        (None, Some(path)) => {
            let s = StateVector::read_snapshot(std::io::BufReader::new(std::fs::File::open(path)?))?;
            if s.n_sites() != cfg.l {
                return Err(CliError::Config(format!(
                    "snapshot has L={}, config has L={}",
                    s.n_sites(),
                    cfg.l
                )));
            }
            s
        }
        (None, None) => return Err(CliError::Config("no initial state".into())),
    };
    Ok(PreparedState { state, sector })
}

/// Time-averaged fidelity `(L, k, tau, sigma, Fbar, s)` for each `(tau, sigma)`.
///
/// For `L <= 14` and sector initial states a `sigma = inf` row from the
/// Floquet eigensystem is appended per `tau`.
pub fn fidelity_sweep(cfg: &RunConfig, opts: &RunOptions) -> Result<Report, CliError> {
    let taus = cfg.taus(&DEFAULT_SWEEP_TAUS)?;
    let sigmas = cfg.sigmas(&DEFAULT_SIGMAS)?;
    let sigma_max = sigmas.iter().cloned().fold(0.0, f64::max);
    let n_max = cfg.n_max.unwrap_or_else(|| required_n_max(sigma_max));
    if n_max < required_n_max(sigma_max) {
        return Err(CliError::Config(format!(
            "n_max={n_max} is shorter than sigma={sigma_max} requires ({})",
            required_n_max(sigma_max)
        )));
    }
    cfg.check_memory(VECTORS_PER_POINT)?;
    let basis = match cfg.initial {
        Initial::Snapshot => None,
        _ => Some(SectorBasis::new(cfg.l)?),
    };
    let sweep = Sweep {
        command: Command::FidelitySweep.name(),
        columns: &["L", "k", "tau", "sigma", "Fbar", "s"],
        labels: labels(&taus),
        grids: vec![("tau", taus.clone()), ("sigma", sigmas.clone())],
        notes: vec![format!("n_max: {n_max}"), format!("initial: {:?}", cfg.initial)],
    };
    sweep::run(cfg, opts, &sweep, |i| {
        let tau = taus[i];
        let p = cfg.params(tau)?;
        let init = initial_state(cfg, &p, basis.as_ref())?;
        let trace = evolve_fidelity(&init.state, &FloquetStepPlan::new(&p)?, n_max, format!("tau={tau}"))?;
        let mut rows = Vec::with_capacity(sigmas.len() + 1);
        for &sigma in &sigmas {
            let avg = time_averaged_fidelity(&trace, sigma)?;
            rows.push(format!(
                "{},{},{},{},{},{}",
                cfg.l,
                cfg.k,
                num(tau),
                num(sigma),
                num(avg.fbar),
                num(avg.rate)
            ));
        }
        if let (Some(v), Some(basis)) = (&init.sector, &basis) {
            if cfg.l <= INFINITE_SIGMA_MAX_SITES {
                let sys = SectorFloquetBuilder::new(&p, basis)?.eigensystem(tau, v)?;
                let inf = infinite_time_fidelity(&sys, v)?;
                rows.push(format!(
                    "{},{},{},inf,{},{}",
                    cfg.l,
                    cfg.k,
                    num(tau),
                    num(inf.fbar),
                    num(inf.rate)
                ));
            }
        }
        Ok(rows)
    })
}

/// Long-time rate `s_inf` for every eigenstate `j` of the truncated
/// effective Hamiltonian.
pub fn eigenstate_scan(cfg: &RunConfig, opts: &RunOptions) -> Result<Report, CliError> {
    cfg.require_max_l(DENSE_SECTOR_MAX_SITES, "eigenstate-scan")?;
    let taus = cfg.taus(&DEFAULT_SCAN_TAUS)?;
    let basis = SectorBasis::new(cfg.l)?;
    let builder = SectorFloquetBuilder::new(&cfg.params(taus[0])?, &basis)?;
    let sweep = Sweep {
        command: Command::EigenstateScan.name(),
        columns: &["L", "tau", "j", "E_j", "s_inf", "annotation"],
        labels: labels(&taus),
        grids: vec![("tau", taus.clone())],
        notes: vec![],
    };
    sweep::run(cfg, opts, &sweep, |i| {
        let tau = taus[i];
        let p = cfg.params(tau)?;
        let spec = EffectiveSpectrum::new(&magnus_truncation(&p, cfg.k)?, &basis)?;
        let sys = builder.eigensystem(tau, &spec.vector(0))?;
        (0..spec.len())
            .map(|j| {
                let inf = infinite_time_fidelity(&sys, &spec.vector(j))?;
                let note = if inf.degenerate {
                    format!("degenerate min_gap={:e}", inf.min_gap)
                } else {
                    "ok".to_string()
                };
                Ok(format!(
                    "{},{},{},{},{},{}",
                    cfg.l,
                    num(tau),
                    j,
                    num(spec.energies[j]),
                    num(inf.rate),
                    note
                ))
            })
            .collect()
    })
}

/// `C[alpha][j] = <theta_alpha|E_j>`.
fn overlap_matrix(sys: &FloquetEigensystem, spec: &EffectiveSpectrum) -> Mat<f64> {
    sys.vectors.transpose() * &spec.vectors
}

/// Quasienergies `theta_alpha` with `<m_z>`, `log10 |<theta_alpha|E_0>|^2`
/// and `theta - E tau` folded, `E` from the best-overlapping eigenstate.
pub fn quasienergy_map(cfg: &RunConfig, opts: &RunOptions) -> Result<Report, CliError> {
    cfg.require_max_l(DENSE_SECTOR_MAX_SITES, "quasienergy-map")?;
    let default: Vec<f64> = (1..=32).map(|i| i as f64 * 0.05).collect();
    let taus = cfg.taus(&default)?;
    let basis = SectorBasis::new(cfg.l)?;
    let builder = SectorFloquetBuilder::new(&cfg.params(taus[0])?, &basis)?;
    let sweep = Sweep {
        command: Command::QuasienergyMap.name(),
        columns: &["tau", "theta_alpha", "mz_expect", "log10_overlap", "theta_minus_E_tau"],
        labels: labels(&taus),
        grids: vec![("tau", taus.clone())],
        notes: vec![],
    };
    sweep::run(cfg, opts, &sweep, |i| {
        let tau = taus[i];
        let p = cfg.params(tau)?;
        let spec = EffectiveSpectrum::new(&magnus_truncation(&p, cfg.k)?, &basis)?;
        let sys = builder.eigensystem(tau, &spec.vector(0))?;
        let c = overlap_matrix(&sys, &spec);
        Ok((0..sys.dim())
            .map(|a| {
                let best = (0..spec.len())
                    .max_by(|&x, &y| c[(a, x)].abs().total_cmp(&c[(a, y)].abs()))
                    .unwrap_or(0);
                let theta = sys.quasienergies[a];
                let resid = fold_angle(theta - spec.energies[best] * tau);
                let ov = sys.overlaps[a] * sys.overlaps[a];
                format!(
                    "{},{},{},{},{}",
                    num(tau),
                    num(theta),
                    num(sys.magnetization[a]),
                    num(ov.log10()),
                    num(resid)
                )
            })
            .collect())
    })
}

/// Exact and golden-rule fidelities of the deformed drive for the ground and
/// mid-spectrum eigenstates of `H0`.
pub fn fgr_compare(cfg: &RunConfig, opts: &RunOptions) -> Result<Report, CliError> {
    cfg.require_max_l(FGR_MAX_SITES, "fgr-compare")?;
    let taus = cfg.taus(&DEFAULT_FGR_TAUS)?;
    let eps = cfg.epsilons(&DEFAULT_EPSILONS)?;
    let n_max = cfg.n_max.unwrap_or(DEFAULT_FGR_N_MAX);
    let basis = SectorBasis::new(cfg.l)?;
    let points: Vec<(f64, f64)> = eps.iter().flat_map(|&e| taus.iter().map(move |&t| (e, t))).collect();
    let sweep = Sweep {
        command: Command::FgrCompare.name(),
        columns: &["n", "F_exact", "F_fgr", "L", "eps", "tau", "j0"],
        labels: points.iter().map(|(e, t)| format!("eps={e} tau={t}")).collect(),
        grids: vec![("eps", eps.clone()), ("tau", taus.clone())],
        notes: vec![
            format!("n_max: {n_max}"),
            format!("delta: {}", DELTA_PER_SITE * cfg.l as f64),
            "photon window: |l Omega| <= E_max - E_min + 6 delta".into(),
        ],
    };
    sweep::run(cfg, opts, &sweep, |i| {
        let (e, tau) = points[i];
        let p = cfg.params(tau)?;
        let sys = DeformedSystem::new(&p, e, &basis)?;
        let model = fgr_rates_from(&p, e, &sys)?;
        let d = sys.h0.len();
        let unit = |j: usize| -> Vec<f64> { (0..d).map(|i| if i == j { 1.0 } else { 0.0 }).collect() };
        let mut exact = FloquetEigensystem::from_unitary(cfg.l, tau, &sys.elements, &vec![0.0; d], &unit(0))?;
        let mut rows = Vec::with_capacity(2 * (n_max + 1));
        for j0 in [0, mid_spectrum_index(&sys.h0.energies)] {
            exact.overlaps = exact.overlaps_with(&unit(j0));
            let f_exact = exact.fidelity_series(n_max);
            let f_fgr = fgr_fidelity(&model, j0, n_max)?;
            for (n, (a, b)) in f_exact.iter().zip(&f_fgr).enumerate() {
                rows.push(format!(
                    "{n},{},{},{},{},{},{j0}",
                    num(*a),
                    num(*b),
                    cfg.l,
                    num(e),
                    num(tau)
                ));
            }
        }
        Ok(rows)
    })
}

/// Spectral functions of the drive operator `K` in the `H0` eigenbasis:
/// the ground state and the average over all states.
pub fn spectral(cfg: &RunConfig, opts: &RunOptions) -> Result<Report, CliError> {
    cfg.require_max_l(FGR_MAX_SITES, "spectral-function")?;
    let p = cfg.params(1.0)?;
    let delta = DELTA_PER_SITE * cfg.l as f64;
    let sweep = Sweep {
        command: Command::SpectralFunction.name(),
        columns: &["omega", "phi_0", "phi_avg"],
        labels: vec!["spectrum".into()],
        grids: vec![],
        notes: vec![format!("delta: {delta}"), format!("omega spacing: {}", delta / 10.0)],
    };
    let basis = SectorBasis::new(cfg.l)?;
    sweep::run(cfg, opts, &sweep, |_| {
        let spec = EffectiveSpectrum::new(&build_h0(&p)?, &basis)?;
        let sf = spectral_function(&spec, &build_drive_k(&p)?, &basis, &[0], delta)?;
        Ok((0..sf.omega.len())
            .map(|i| format!("{},{},{}", num(sf.omega[i]), num(sf.phi[0][i]), num(sf.phi_average[i])))
            .collect())
    })
}

/// Perturbative `-ln F~_j(n)` from `delta U` next to the exact `-ln F_j(n)`
/// for the ground and mid-spectrum eigenstates.
pub fn pert_fidelity(cfg: &RunConfig, opts: &RunOptions) -> Result<Report, CliError> {
    cfg.require_max_l(DELTA_U_MAX_SITES, "pert-fidelity")?;
    let taus = cfg.taus(&[0.5])?;
    let n_max = cfg.n_max.unwrap_or(DEFAULT_FGR_N_MAX);
    let basis = SectorBasis::new(cfg.l)?;
    let builder = SectorFloquetBuilder::new(&cfg.params(taus[0])?, &basis)?;
    let sweep = Sweep {
        command: Command::PertFidelity.name(),
        columns: &[
            "L",
            "k",
            "tau",
            "j",
            "n",
            "neg_log_f_pert",
            "neg_log_f_exact",
            "neg_log_f_pert_inf",
        ],
        labels: labels(&taus),
        grids: vec![("tau", taus.clone())],
        notes: vec![format!("n_max: {n_max}")],
    };
    let n_grid: Vec<usize> = (0..=n_max).collect();
    sweep::run(cfg, opts, &sweep, |i| {
        let tau = taus[i];
        let p = cfg.params(tau)?;
        let du = delta_u_matrix(&p, cfg.k, &basis)?;
        let mut rows = Vec::new();
        for j in [0, mid_spectrum_index(&du.energies)] {
            let v: Vec<f64> = (0..du.dim()).map(|r| du.eigenvectors[(r, j)]).collect();
            let pert = perturbative_fidelity(&du, j, &n_grid)?;
            let exact = builder.eigensystem(tau, &v)?.fidelity_series(n_max);
            for (n, (a, f)) in pert.log_fidelity.iter().zip(&exact).enumerate() {
                rows.push(format!(
                    "{},{},{},{j},{n},{},{},{}",
                    cfg.l,
                    cfg.k,
                    num(tau),
                    num(*a),
                    num(-f.ln()),
                    num(pert.long_time)
                ));
            }
        }
        Ok(rows)
    })
}

/// One self-test outcome.
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Quick internal consistency checks; random states use `cfg.seed`.
pub fn selftest(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let n = 10;
    let p = ModelParams::new(n, 0.7)?;
    let psi = StateVector::random(n, cfg.seed)?;
    let mut checks = Vec::new();

    let plan = FloquetStepPlan::new(&p)?;
    let fused = plan.fidelity_series(&psi, 50)?;
    let mut stepped = psi.clone();
    let mut worst = 0.0f64;
    for f in fused.iter().skip(1) {
        plan.apply(&mut stepped)?;
        worst = worst.max((psi.inner(&stepped)?.norm_sqr() - f).abs());
    }
    checks.push(Check {
        name: "fused trace equals stepwise trace",
        passed: worst < 1e-12,
        detail: format!("max deviation {worst:.2e}"),
    });

    let seq = plan.clone().with_exec(Exec::Sequential).fidelity_series(&psi, 20)?;
    let par = plan.clone().with_exec(Exec::Parallel).fidelity_series(&psi, 20)?;
    checks.push(Check {
        name: "sequential and parallel traces agree bitwise",
        passed: seq.iter().zip(&par).all(|(a, b)| a.to_bits() == b.to_bits()),
        detail: String::new(),
    });

    checks.push(Check {
        name: "norm preserved over 200 cycles",
        passed: (stepped_norm(&plan, &psi, 200)? - 1.0).abs() < 1e-12,
        detail: String::new(),
    });

    let basis = SectorBasis::new(n)?;
    let reference = vec![1.0 / (basis.dim() as f64).sqrt(); basis.dim()];
    let sys = SectorFloquetBuilder::new(&p, &basis)?.eigensystem(p.tau, &reference)?;
    let v: Vec<f64> = (0..sys.dim()).map(|i| sys.vectors[(i, sys.dim() / 2)]).collect();
    let trace = plan.fidelity_series(&basis.lift(&v)?, 100)?;
    let drift = trace.iter().map(|f| (f - 1.0).abs()).fold(0.0, f64::max);
    checks.push(Check {
        name: "Floquet eigenvector is stationary under full-space evolution",
        passed: drift < 1e-10,
        detail: format!("max |F-1| {drift:.2e}"),
    });

    let kernel = DSigmaKernel::new(300.0)?;
    let lattice = (-3..=3).all(|l| kernel.eval(std::f64::consts::TAU * l as f64) == 1.0);
    checks.push(Check {
        name: "D_sigma equals one on the 2 pi lattice",
        passed: lattice,
        detail: String::new(),
    });
    Ok(checks)
}

fn stepped_norm(plan: &FloquetStepPlan, psi: &StateVector, steps: usize) -> Result<f64, CliError> {
    let mut s = psi.clone();
    for _ in 0..steps {
        plan.apply(&mut s)?;
    }
    Ok(s.norm())
}
