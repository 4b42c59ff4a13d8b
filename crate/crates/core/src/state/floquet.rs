//! One-cycle Floquet operator `T(tau) = e^{-i H1 tau/2} e^{-i H2 tau} e^{-i H1 tau/2}`.

use num_complex::Complex64;

use super::{kernel, StateVector};
use crate::error::{Error, Result};
use crate::fidelity::{FidelityTrace, Provenance};
use crate::par::Exec;
use crate::pauli::model::{build_h1, ModelParams};

/// Anything that advances a full-space state by one drive cycle.
pub trait Propagator {
    fn n_sites(&self) -> usize;

    /// Half period of the cycle.
    fn tau(&self) -> f64;

    fn apply(&self, state: &mut StateVector) -> Result<()>;

    /// `|<psi0|U^n|psi0>|^2` for `n = 0..=n_max` with one evolving copy.
    fn fidelity_series(&self, initial: &StateVector, n_max: usize) -> Result<Vec<f64>> {
        let mut psi = initial.clone();
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(initial.inner(initial)?.norm_sqr());
        for _ in 0..n_max {
            self.apply(&mut psi)?;
            out.push(initial.inner(&psi)?.norm_sqr());
        }
        Ok(out)
    }
}

fn check_dim(n_sites: usize, state: &StateVector) -> Result<()> {
    if state.n_sites() != n_sites {
        return Err(Error::DimensionMismatch {
            expected: 1 << n_sites,
            found: state.dim(),
        });
    }
    Ok(())
}

/// Precomputed Trotter cycle: a diagonal half-step phase table for `H1` and
/// the single-site rotation `e^{+i (g tau/2) X}` for `H2`.
#[derive(Clone, Debug)]
pub struct FloquetStepPlan {
    n_sites: usize,
    tau: f64,
    half: Vec<Complex64>,
    cos: f64,
    sin: f64,
    exec: Exec,
}

impl FloquetStepPlan {
    pub fn new(p: &ModelParams) -> Result<Self> {
        Self::for_tau(p, p.tau)
    }

    /// Plan for an arbitrary real `tau`; `tau = 0` is the identity and
    /// `T(-tau)` is the adjoint of `T(tau)`.
    pub fn for_tau(p: &ModelParams, tau: f64) -> Result<Self> {
        if p.n_sites > super::MAX_STATE_SITES {
            return Err(Error::SizeGuard {
                what: "Floquet step plan",
                n_sites: p.n_sites,
                max: super::MAX_STATE_SITES,
            });
        }
        if !tau.is_finite() {
            return Err(Error::InvalidParams(format!("tau={tau}")));
        }
        let params = ModelParams { tau: 1.0, ..*p };
        let energies = build_h1(&params)?.diagonal_values()?;
        let half = energies
            .iter()
            .map(|e| Complex64::from_polar(1.0, -e * tau / 2.0))
            .collect();
        let angle = p.g * tau / 2.0;
        Ok(Self {
            n_sites: p.n_sites,
            tau,
            half,
            cos: angle.cos(),
            sin: angle.sin(),
            exec: Exec::default(),
        })
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    pub fn half_phases(&self) -> &[Complex64] {
        &self.half
    }
}

impl Propagator for FloquetStepPlan {
    fn n_sites(&self) -> usize {
        self.n_sites
    }

    fn tau(&self) -> f64 {
        self.tau
    }

    fn apply(&self, state: &mut StateVector) -> Result<()> {
        check_dim(self.n_sites, state)?;
        let amps = state.amplitudes_mut();
        kernel::apply_diagonal(amps, &self.half, self.exec);
        kernel::apply_x_layer(amps, self.n_sites, self.cos, self.sin, self.exec);
        kernel::apply_diagonal(amps, &self.half, self.exec);
        Ok(())
    }

    /// Fused evolution: consecutive half-steps merge into one full diagonal
    /// step, and the overlap with `D^dagger psi0` is taken in the same sweep,
    /// so each cycle costs one X layer plus one diagonal pass.
    fn fidelity_series(&self, initial: &StateVector, n_max: usize) -> Result<Vec<f64>> {
        check_dim(self.n_sites, initial)?;
        let psi0 = initial.amplitudes();
        let bra: Vec<Complex64> = psi0.iter().zip(&self.half).map(|(a, d)| a * d.conj()).collect();
        let full: Vec<Complex64> = self.half.iter().map(|d| d * d).collect();
        let mut phi: Vec<Complex64> = psi0.iter().zip(&self.half).map(|(a, d)| a * d).collect();
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(kernel::inner(psi0, psi0, self.exec).norm_sqr());
        for _ in 0..n_max {
            kernel::apply_x_layer(&mut phi, self.n_sites, self.cos, self.sin, self.exec);
            let ov = kernel::overlap_then_diagonal(&bra, &mut phi, &full, self.exec);
            out.push(ov.norm_sqr());
        }
        Ok(out)
    }
}

/// Fidelity trace `F(n) = |<psi0|U^n|psi0>|^2`, `n = 0..=n_max`.
pub fn evolve_fidelity<P: Propagator + ?Sized>(
    initial: &StateVector,
    plan: &P,
    n_max: usize,
    label: impl Into<String>,
) -> Result<FidelityTrace> {
    let values = plan.fidelity_series(initial, n_max)?;
    let provenance = Provenance {
        n_sites: plan.n_sites(),
        label: label.into(),
    };
    FidelityTrace::new(plan.tau(), values, provenance)
}
