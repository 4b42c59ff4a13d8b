//! Floquet golden-rule kinetics for the deformed drive and the perturbative
//! fidelity built from `delta U`.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SplitComplex;
use crate::par::{self, Exec};
use crate::pauli::model::{build_h0, ModelParams};
use crate::pauli::PauliOperator;
use crate::spectral::sector::{SectorBasis, SectorOperator};
use crate::spectral::{deformed_sector_unitary, DeltaUMatrix, EffectiveSpectrum};

/// Largest chain for the dense golden-rule construction.
pub const FGR_MAX_SITES: usize = 14;

/// Gaussian width per site used to regularize energy conservation.
pub const DELTA_PER_SITE: f64 = 0.035;

/// Half-width, in units of the Gaussian width, kept around each delta peak.
pub const GAUSSIAN_WINDOW: f64 = 6.0;

/// Resonance guard on `|e^{i(theta_j - theta_j')} - 1|`.
pub const RESONANCE_TOLERANCE: f64 = 1e-12;

/// `exp(-(x/Delta)^2) / (Delta sqrt(pi))`.
pub fn gaussian_delta(x: f64, delta: f64) -> f64 {
    (-(x / delta).powi(2)).exp() / (delta * std::f64::consts::PI.sqrt())
}

/// Index of the energy closest to zero.
pub fn mid_spectrum_index(energies: &[f64]) -> usize {
    (0..energies.len())
        .min_by(|&a, &b| energies[a].abs().total_cmp(&energies[b].abs()))
        .unwrap_or(0)
}

#[derive(Clone, Debug)]
pub struct FgrModel {
    pub n_sites: usize,
    pub tau: f64,
    pub epsilon: f64,
    pub delta: f64,
    /// Drive period `T = 2 tau`.
    pub period: f64,
    /// Drive frequency `Omega = pi / tau`.
    pub omega: f64,
    /// Eigenvalues of `H0` in the sector, ascending.
    pub energies: Vec<f64>,
    /// Entry `(j, j')` is the rate `w_{j -> j'}`.
    pub rates: Mat<f64>,
    /// Photon numbers `l` with `|l Omega| <= span + 6 Delta`.
    pub photon_window: (i64, i64),
}

impl FgrModel {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Sum of rates out of `j`.
    pub fn escape_rate(&self, j: usize) -> f64 {
        (0..self.dim()).map(|k| self.rates[(j, k)]).sum()
    }

    /// Build directly from energies and `|<E_j'|U|E_j>|^2` (entry `(j', j)`).
    pub fn from_elements(
        n_sites: usize,
        tau: f64,
        epsilon: f64,
        delta: f64,
        energies: Vec<f64>,
        weights: &Mat<f64>,
    ) -> Result<Self> {
        let d = energies.len();
        if weights.nrows() != d || weights.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: weights.nrows(),
            });
        }
        if !(delta > 0.0 && tau > 0.0) {
            return Err(Error::InvalidParams(format!("delta={delta}, tau={tau}")));
        }
        let period = 2.0 * tau;
        let omega = std::f64::consts::PI / tau;
        let span = match (energies.first(), energies.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        };
        let l_max = ((span + GAUSSIAN_WINDOW * delta) / omega).floor() as i64;
        let prefactor = 2.0 * std::f64::consts::PI / (period * period);
        let rows = par::map_collect(d, Exec::default(), |j| {
            (0..d)
                .map(|jp| {
                    if jp == j {
                        return 0.0;
                    }
                    let de = energies[jp] - energies[j];
                    let comb: f64 = (-l_max..=l_max)
                        .map(|l| gaussian_delta(de - l as f64 * omega, delta))
                        .sum();
                    prefactor * weights[(jp, j)] * comb
                })
                .collect::<Vec<f64>>()
        });
        let rates = Mat::from_fn(d, d, |j, jp| rows[j][jp]);
        Ok(Self {
            n_sites,
            tau,
            epsilon,
            delta,
            period,
            omega,
            energies,
            rates,
            photon_window: (-l_max, l_max),
        })
    }
}

/// Eigenbasis of `H0` and the deformed one-cycle unitary in that basis.
#[derive(Clone, Debug)]
pub struct DeformedSystem {
    pub h0: EffectiveSpectrum,
    /// Entry `(j', j)` is `<E_j'|U|E_j>`.
    pub elements: SplitComplex,
}

impl DeformedSystem {
    pub fn new(p: &ModelParams, epsilon: f64, basis: &SectorBasis) -> Result<Self> {
        if p.n_sites > FGR_MAX_SITES {
            return Err(Error::SizeGuard {
                what: "golden-rule rates",
                n_sites: p.n_sites,
                max: FGR_MAX_SITES,
            });
        }
        let h0 = EffectiveSpectrum::new(&build_h0(p)?, basis)?;
        let u = deformed_sector_unitary(p, epsilon, basis)?;
        let elements = u.congruence(&h0.vectors);
        Ok(Self { h0, elements })
    }

    pub fn weights(&self) -> Mat<f64> {
        let d = self.h0.len();
        Mat::from_fn(d, d, |i, j| {
            self.elements.re[(i, j)].powi(2) + self.elements.im[(i, j)].powi(2)
        })
    }
}

pub fn fgr_rates(p: &ModelParams, epsilon: f64, basis: &SectorBasis) -> Result<FgrModel> {
    let sys = DeformedSystem::new(p, epsilon, basis)?;
    fgr_rates_from(p, epsilon, &sys)
}

pub fn fgr_rates_from(p: &ModelParams, epsilon: f64, sys: &DeformedSystem) -> Result<FgrModel> {
    FgrModel::from_elements(
        p.n_sites,
        p.tau,
        epsilon,
        DELTA_PER_SITE * p.n_sites as f64,
        sys.h0.energies.clone(),
        &sys.weights(),
    )
}

/// Probability vectors `P(t)` at each requested time.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MasterTrajectory {
    pub times: Vec<f64>,
    pub probabilities: Vec<Vec<f64>>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct MasterOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Allowed excursion outside `[0, 1]` before a step is rejected.
    pub bound_slack: f64,
    pub max_steps: usize,
}

impl Default for MasterOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            bound_slack: 1e-12,
            max_steps: 10_000_000,
        }
    }
}

fn master_rhs(rates: &Mat<f64>, escape: &[f64], p: &[f64], out: &mut [f64]) {
    let d = p.len();
    for (j, o) in out.iter_mut().enumerate() {
        let mut gain = 0.0;
        for k in 0..d {
            gain += rates[(k, j)] * p[k];
        }
        *o = gain - escape[j] * p[j];
    }
}

/// Integrate `dP_j/dt = sum_j' [w_{j'->j} P_j' - w_{j->j'} P_j]` from
/// `P_j(0) = delta_{j j0}` with adaptive Dormand-Prince 5(4) steps.
pub fn evolve_master(model: &FgrModel, j0: usize, times: &[f64]) -> Result<MasterTrajectory> {
    evolve_master_with(model, j0, times, &MasterOptions::default())
}

pub fn evolve_master_with(
    model: &FgrModel,
    j0: usize,
    times: &[f64],
    opts: &MasterOptions,
) -> Result<MasterTrajectory> {
    let d = model.dim();
    if j0 >= d {
        return Err(Error::InvalidArgument(format!("initial index {j0} outside 0..{d}")));
    }
    if times.iter().any(|t| !(*t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument(
            "times must be non-negative and ascending".into(),
        ));
    }
    // Dormand-Prince tableau.
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let escape: Vec<f64> = (0..d).map(|j| model.escape_rate(j)).collect();
    let max_rate = escape.iter().cloned().fold(0.0, f64::max);
    let mut p = vec![0.0; d];
    p[j0] = 1.0;
    let mut t = 0.0;
    let mut h = if max_rate > 0.0 { 0.1 / max_rate } else { f64::INFINITY };
    let mut k = vec![vec![0.0; d]; 7];
    let mut stage = vec![0.0; d];
    let mut p5 = vec![0.0; d];
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let mut out = Vec::with_capacity(times.len());

    for &target in times {
        while t < target {
            if max_rate == 0.0 {
                t = target;
                break;
            }
            let step = h.min(target - t);
            master_rhs(&model.rates, &escape, &p, &mut k[0]);
            for s in 1..7 {
                for i in 0..d {
                    let mut acc = p[i];
                    for (r, a) in A[s].iter().enumerate().take(s) {
                        acc += step * a * k[r][i];
                    }
                    stage[i] = acc;
                }
                master_rhs(&model.rates, &escape, &stage, &mut k[s]);
            }
            let mut err = 0.0f64;
            let mut in_bounds = true;
            for i in 0..d {
                let mut y5 = p[i];
                let mut y4 = p[i];
                for s in 0..7 {
                    y5 += step * B5[s] * k[s][i];
                    y4 += step * B4[s] * k[s][i];
                }
                p5[i] = y5;
                let scale = opts.atol + opts.rtol * p[i].abs().max(y5.abs());
                err = err.max((y5 - y4).abs() / scale);
                if y5 < -opts.bound_slack || y5 > 1.0 + opts.bound_slack {
                    in_bounds = false;
                }
            }
            if err <= 1.0 && in_bounds {
                t += step;
                std::mem::swap(&mut p, &mut p5);
                accepted += 1;
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if step == h {
                    h *= grow;
                }
            } else {
                rejected += 1;
                let shrink = if in_bounds {
                    (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
                } else {
                    0.5
                };
                h = step * shrink;
            }
            if h < 1e-14 * t.max(1.0) {
                return Err(Error::StepSize {
                    t,
                    reason: format!("step underflow (h={h:.3e}, error ratio {err:.3e})"),
                });
            }
            if accepted + rejected > opts.max_steps {
                return Err(Error::StepSize {
                    t,
                    reason: format!("exceeded {} steps", opts.max_steps),
                });
            }
        }
        out.push(p.clone());
    }
    Ok(MasterTrajectory {
        times: times.to_vec(),
        probabilities: out,
        accepted_steps: accepted,
        rejected_steps: rejected,
    })
}

/// Golden-rule fidelity `F(n) = P_{j0}(n T)^2` for `n = 0..=n_max`.
pub fn fgr_fidelity(model: &FgrModel, j0: usize, n_max: usize) -> Result<Vec<f64>> {
    let times: Vec<f64> = (0..=n_max).map(|n| n as f64 * model.period).collect();
    let traj = evolve_master(model, j0, &times)?;
    Ok(traj.probabilities.iter().map(|p| p[j0] * p[j0]).collect())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralFunction {
    pub delta: f64,
    pub omega: Vec<f64>,
    pub selected: Vec<usize>,
    /// `phi_j(omega)` for each selected `j`.
    pub phi: Vec<Vec<f64>>,
    /// `D^{-1} sum_j phi_j(omega)`.
    pub phi_average: Vec<f64>,
}

impl SpectralFunction {
    pub fn spacing(&self) -> f64 {
        if self.omega.len() < 2 {
            0.0
        } else {
            self.omega[1] - self.omega[0]
        }
    }

    /// Trapezoidal integral of `phi_j` for the `i`-th selected state.
    pub fn integral(&self, i: usize) -> f64 {
        let f = &self.phi[i];
        let h = self.spacing();
        let inner: f64 = f.iter().sum();
        h * (inner - 0.5 * (f[0] + f[f.len() - 1]))
    }
}

/// Gaussian-broadened spectral functions of `op` in the eigenbasis `spec`,
/// on a grid of spacing `delta / 10` spanning the transition energies
/// `+- 6 delta`.
pub fn spectral_function(
    spec: &EffectiveSpectrum,
    op: &PauliOperator,
    basis: &SectorBasis,
    selected: &[usize],
    delta: f64,
) -> Result<SpectralFunction> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta={delta}")));
    }
    let d = spec.len();
    if let Some(j) = selected.iter().find(|&&j| j >= d) {
        return Err(Error::InvalidArgument(format!("state {j} outside 0..{d}")));
    }
    let m = SectorOperator::new(op, basis)?.to_dense()?;
    let km = crate::linalg::congruence(&spec.vectors, &m);
    let span = spec.energies[d - 1] - spec.energies[0];
    let h = delta / 10.0;
    let half = ((span + GAUSSIAN_WINDOW * delta) / h).ceil() as i64;
    let omega: Vec<f64> = (-half..=half).map(|i| i as f64 * h).collect();
    let n = omega.len();
    let reach = (GAUSSIAN_WINDOW * delta / h).ceil() as i64;

    let accumulate = |j: usize, acc: &mut [f64]| {
        for jp in 0..d {
            let w = km[(jp, j)].powi(2);
            if w == 0.0 {
                continue;
            }
            let center = spec.energies[jp] - spec.energies[j];
            let c = (center / h).round() as i64 + half;
            for i in (c - reach).max(0)..=(c + reach).min(n as i64 - 1) {
                let i = i as usize;
                acc[i] += w * gaussian_delta(omega[i] - center, delta);
            }
        }
    };
    let phi: Vec<Vec<f64>> = selected
        .iter()
        .map(|&j| {
            let mut acc = vec![0.0; n];
            accumulate(j, &mut acc);
            acc
        })
        .collect();
    let per_state = par::map_collect(d, Exec::default(), |j| {
        let mut acc = vec![0.0; n];
        accumulate(j, &mut acc);
        acc
    });
    let mut phi_average = vec![0.0; n];
    for row in &per_state {
        for (a, x) in phi_average.iter_mut().zip(row) {
            *a += x;
        }
    }
    phi_average.iter_mut().for_each(|a| *a /= d as f64);
    Ok(SpectralFunction {
        delta,
        omega,
        selected: selected.to_vec(),
        phi,
        phi_average,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerturbativeFidelity {
    pub state: usize,
    pub n: Vec<usize>,
    /// `-ln F~_j(n)`.
    pub log_fidelity: Vec<f64>,
    /// `-ln F~_j^inf`.
    pub long_time: f64,
}

struct Channel {
    half_gap: f64,
    weight: f64,
}

fn channels(du: &DeltaUMatrix, j: usize) -> Result<Vec<Channel>> {
    let d = du.dim();
    if j >= d {
        return Err(Error::InvalidArgument(format!("state {j} outside 0..{d}")));
    }
    let thetas = du.thetas();
    let mut resonant = Vec::new();
    let mut out = Vec::with_capacity(d - 1);
    for jp in 0..d {
        if jp == j {
            continue;
        }
        let half_gap = 0.5 * (thetas[j] - thetas[jp]);
        // |e^{i x} - 1| = 2 |sin(x / 2)|
        if 2.0 * half_gap.sin().abs() < RESONANCE_TOLERANCE {
            resonant.push((j, jp));
            continue;
        }
        out.push(Channel {
            half_gap,
            weight: du.abs_sqr(j, jp),
        });
    }
    if !resonant.is_empty() {
        return Err(Error::Resonant(resonant));
    }
    Ok(out)
}

/// `-ln F~_j(n) = sum_{j' != j} sin^2(x n) / sin^2(x) |<E_j|dU|E_j'>|^2`,
/// `x = (theta_j - theta_j')/2`, `theta = E tau`; the long-time value
/// replaces `sin^2(x n)` by `1/2`.
pub fn perturbative_fidelity(du: &DeltaUMatrix, j: usize, n_grid: &[usize]) -> Result<PerturbativeFidelity> {
    let ch = channels(du, j)?;
    let log_fidelity = n_grid
        .iter()
        .map(|&n| {
            ch.iter()
                .map(|c| (c.half_gap * n as f64).sin().powi(2) / c.half_gap.sin().powi(2) * c.weight)
                .sum()
        })
        .collect();
    let long_time = ch.iter().map(|c| 0.5 * c.weight / c.half_gap.sin().powi(2)).sum();
    Ok(PerturbativeFidelity {
        state: j,
        n: n_grid.to_vec(),
        log_fidelity,
        long_time,
    })
}

/// Mean of `-ln F~_j(n)` over `n = 0..window`, from the closed form
/// `mean sin^2(x n) = 1/2 - Re[(1 - e^{2ixN}) / (1 - e^{2ix})] / (2N)`.
pub fn perturbative_window_mean(du: &DeltaUMatrix, j: usize, window: f64) -> Result<f64> {
    if !(window >= 1.0) {
        return Err(Error::InvalidArgument(format!("window={window}")));
    }
    let ch = channels(du, j)?;
    Ok(ch
        .iter()
        .map(|c| {
            let y = 2.0 * c.half_gap;
            let num = num_complex::Complex64::new(1.0, 0.0) - num_complex::Complex64::from_polar(1.0, y * window);
            let den = num_complex::Complex64::new(1.0, 0.0) - num_complex::Complex64::from_polar(1.0, y);
            let mean_sin2 = 0.5 - (num / den).re / (2.0 * window);
            mean_sin2 / c.half_gap.sin().powi(2) * c.weight
        })
        .sum())
}
