//! Kicked Ising model terms on a periodic chain.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Pauli, PauliOperator, PauliString, MAX_SITES};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_sites: usize,
    pub j: f64,
    pub h: f64,
    pub g: f64,
    /// Half period; one drive cycle lasts `2 * tau`.
    pub tau: f64,
}

impl ModelParams {
    pub fn new(n_sites: usize, tau: f64) -> Result<Self> {
        let p = Self {
            n_sites,
            j: 1.0,
            h: 1.0,
            g: 1.0,
            tau,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_couplings(mut self, j: f64, h: f64, g: f64) -> Result<Self> {
        self.j = j;
        self.h = h;
        self.g = g;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tau(mut self, tau: f64) -> Result<Self> {
        self.tau = tau;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 || self.n_sites > MAX_SITES {
            return Err(Error::InvalidParams(format!(
                "L={} outside 2..={MAX_SITES}",
                self.n_sites
            )));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidParams(format!("tau={} must be positive", self.tau)));
        }
        if ![self.j, self.h, self.g].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidParams("non-finite coupling".into()));
        }
        Ok(())
    }

    pub fn period(&self) -> f64 {
        2.0 * self.tau
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `H1 = -sum_j [ (J/4) Z_j Z_{j+1} + (h/2) Z_j ]` with periodic wrap.
pub fn build_h1(p: &ModelParams) -> Result<PauliOperator> {
    p.validate()?;
    let l = p.n_sites;
    let mut op = PauliOperator::zero(l);
    for site in 0..l {
        let bond = PauliString::from_sites(&[(site, Pauli::Z), ((site + 1) % l, Pauli::Z)]);
        op.add_term(bond, real(-p.j / 4.0));
        op.add_term(PauliString::single(site, Pauli::Z), real(-p.h / 2.0));
    }
    Ok(op.simplified())
}

/// `H2 = -(g/2) sum_j X_j`.
pub fn build_h2(p: &ModelParams) -> Result<PauliOperator> {
    p.validate()?;
    let mut op = PauliOperator::zero(p.n_sites);
    for site in 0..p.n_sites {
        op.add_term(PauliString::single(site, Pauli::X), real(-p.g / 2.0));
    }
    Ok(op.simplified())
}

/// Time-averaged Hamiltonian of the deformed drive, `(H1 + H2) / 2`.
pub fn build_h0(p: &ModelParams) -> Result<PauliOperator> {
    Ok(build_h1(p)?.plus(&build_h2(p)?)?.scaled_real(0.5))
}

/// Drive operator of the deformed model, `(H1 - H2) / 2`.
pub fn build_drive_k(p: &ModelParams) -> Result<PauliOperator> {
    Ok(build_h1(p)?.minus(&build_h2(p)?)?.scaled_real(0.5))
}

/// `m_z = L^{-1} sum_j Z_j`.
pub fn magnetization_z(n_sites: usize) -> PauliOperator {
    let mut op = PauliOperator::zero(n_sites);
    for site in 0..n_sites {
        op.add_term(PauliString::single(site, Pauli::Z), real(1.0 / n_sites as f64));
    }
    op
}

/// `M^{pi/4} = 2^{-1/2} sum_j (X_j + Z_j)`.
pub fn tilted_magnetization(n_sites: usize) -> PauliOperator {
    let c = real(std::f64::consts::FRAC_1_SQRT_2);
    let mut op = PauliOperator::zero(n_sites);
    for site in 0..n_sites {
        op.add_term(PauliString::single(site, Pauli::X), c);
        op.add_term(PauliString::single(site, Pauli::Z), c);
    }
    op
}

/// `(|H1| + |H2|) tau / pi` from the coefficient-sum norm bounds; reported
/// as a diagnostic only.
pub fn convergence_ratio(p: &ModelParams) -> Result<f64> {
    let n1 = build_h1(p)?.spectral_norm_bound();
    let n2 = build_h2(p)?.spectral_norm_bound();
    Ok((n1 + n2) * p.tau / std::f64::consts::PI)
}
