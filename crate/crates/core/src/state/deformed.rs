//! Full-space cycle of the deformed drive `H0 + eps g(t) K`:
//! `U = e^{-i(H0+eps K)tau/2} e^{-i(H0-eps K)tau} e^{-i(H0+eps K)tau/2}`.
//!
//! The two generators are real symmetric in the computational basis, so each
//! sub-unitary is stored factored as `V e^{-i lambda t} V^T`.

use faer::Mat;
use num_complex::Complex64;

use super::floquet::Propagator;
use super::StateVector;
use crate::error::{Error, Result};
use crate::linalg::sym_eigen;
use crate::pauli::model::{build_drive_k, build_h0, ModelParams};
use crate::pauli::PauliOperator;

/// Largest chain for the full-space dense deformed cycle (two `2^L x 2^L`
/// real eigenvector matrices must fit in memory).
pub const DEFORMED_DENSE_MAX_SITES: usize = 12;

#[derive(Clone, Debug)]
struct Factored {
    vecs: Mat<f64>,
    vals: Vec<f64>,
}

impl Factored {
    fn new(op: &PauliOperator) -> Result<Self> {
        let (vals, vecs) = sym_eigen(&op.to_dense_real()?)?;
        Ok(Self { vecs, vals })
    }

    /// `x <- V e^{-i lambda t} V^T x` on a two-column (re, im) block.
    fn apply(&self, x: &Mat<f64>, t: f64) -> Mat<f64> {
        let mut y = self.vecs.transpose() * x;
        for (k, l) in self.vals.iter().enumerate() {
            let (s, c) = (-l * t).sin_cos();
            let (re, im) = (y[(k, 0)], y[(k, 1)]);
            y[(k, 0)] = c * re - s * im;
            y[(k, 1)] = s * re + c * im;
        }
        &self.vecs * &y
    }
}

#[derive(Clone, Debug)]
pub struct DeformedStepPlan {
    n_sites: usize,
    tau: f64,
    epsilon: f64,
    plus: Factored,
    minus: Factored,
}

impl DeformedStepPlan {
    pub fn new(p: &ModelParams, epsilon: f64) -> Result<Self> {
        p.validate()?;
        if p.n_sites > DEFORMED_DENSE_MAX_SITES {
            return Err(Error::SizeGuard {
                what: "dense deformed cycle",
                n_sites: p.n_sites,
                max: DEFORMED_DENSE_MAX_SITES,
            });
        }
        if !epsilon.is_finite() {
            return Err(Error::InvalidParams(format!("epsilon={epsilon}")));
        }
        let h0 = build_h0(p)?;
        let k = build_drive_k(p)?;
        let eps = Complex64::new(epsilon, 0.0);
        Ok(Self {
            n_sites: p.n_sites,
            tau: p.tau,
            epsilon,
            plus: Factored::new(&h0.plus_scaled(&k, eps)?)?,
            minus: Factored::new(&h0.plus_scaled(&k, -eps)?)?,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl Propagator for DeformedStepPlan {
    fn n_sites(&self) -> usize {
        self.n_sites
    }

    fn tau(&self) -> f64 {
        self.tau
    }

    fn apply(&self, state: &mut StateVector) -> Result<()> {
        if state.n_sites() != self.n_sites {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.n_sites,
                found: state.dim(),
            });
        }
        let amps = state.amplitudes_mut();
        let mut x = Mat::from_fn(amps.len(), 2, |i, j| if j == 0 { amps[i].re } else { amps[i].im });
        x = self.plus.apply(&x, self.tau / 2.0);
        x = self.minus.apply(&x, self.tau);
        x = self.plus.apply(&x, self.tau / 2.0);
        for (i, a) in amps.iter_mut().enumerate() {
            *a = Complex64::new(x[(i, 0)], x[(i, 1)]);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::floquet::FloquetStepPlan;

    #[test]
    fn unit_epsilon_matches_trotter_cycle() {
        let p = ModelParams::new(6, 0.9).unwrap();
        let deformed = DeformedStepPlan::new(&p, 1.0).unwrap();
        let trotter = FloquetStepPlan::new(&p).unwrap();
        let mut a = StateVector::random(6, 2).unwrap();
        let mut b = a.clone();
        deformed.apply(&mut a).unwrap();
        trotter.apply(&mut b).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn size_guard() {
        let p = ModelParams::new(DEFORMED_DENSE_MAX_SITES + 1, 0.9).unwrap();
        assert!(matches!(DeformedStepPlan::new(&p, 0.3), Err(Error::SizeGuard { .. })));
    }
}
