//! Truncated Baker-Campbell-Hausdorff algebra and the effective Floquet
//! Hamiltonians `H_F^{(2k)}`.
//!
//! Exponents are carried as power series in a formal grading variable (the
//! half period `tau`); component `n` multiplies `tau^n`. All products are
//! truncated at [`MAX_DEGREE`].

use num_complex::Complex64;

use super::model::{build_h1, build_h2, ModelParams};
use super::{commutator, PauliOperator};
use crate::error::{Error, Result};

/// Highest grading degree retained; the BCH series below is exact through it.
pub const MAX_DEGREE: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct GradedSeries {
    n_sites: usize,
    parts: Vec<PauliOperator>,
}

impl GradedSeries {
    pub fn zero(n_sites: usize) -> Self {
        Self {
            n_sites,
            parts: vec![PauliOperator::zero(n_sites); MAX_DEGREE + 1],
        }
    }

    /// Series with a single homogeneous component.
    pub fn homogeneous(op: PauliOperator, degree: usize) -> Self {
        let mut s = Self::zero(op.n_sites());
        if degree <= MAX_DEGREE {
            s.parts[degree] = op;
        }
        s
    }

    pub fn component(&self, degree: usize) -> &PauliOperator {
        &self.parts[degree]
    }

    pub fn plus_scaled(&self, other: &Self, factor: f64) -> Result<Self> {
        let parts = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| a.plus_scaled(b, Complex64::new(factor, 0.0)))
            .collect::<Result<_>>()?;
        Ok(Self {
            n_sites: self.n_sites,
            parts,
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n_sites: self.n_sites,
            parts: self.parts.iter().map(|p| p.scaled_real(factor)).collect(),
        }
    }

    /// Truncated commutator: degrees add, anything above [`MAX_DEGREE`] is dropped.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.n_sites);
        for (da, a) in self.parts.iter().enumerate() {
            if a.is_empty() {
                continue;
            }
            for (db, b) in other.parts.iter().enumerate() {
                if b.is_empty() || da + db > MAX_DEGREE {
                    continue;
                }
                let c = commutator(a, b)?;
                out.parts[da + db] = out.parts[da + db].plus(&c)?;
            }
        }
        Ok(out)
    }
}

/// `log(e^X e^Y)` through fourth order in the grading:
/// `X + Y + [X,Y]/2 + [X,[X,Y]]/12 - [Y,[X,Y]]/12 - [Y,[X,[X,Y]]]/24`.
///
/// Exact through [`MAX_DEGREE`] when `X` and `Y` have no degree-0 part.
pub fn bch(x: &GradedSeries, y: &GradedSeries) -> Result<GradedSeries> {
    let xy = x.commutator(y)?;
    let x_xy = x.commutator(&xy)?;
    let y_xy = y.commutator(&xy)?;
    let y_x_xy = y.commutator(&x_xy)?;
    x.plus_scaled(y, 1.0)?
        .plus_scaled(&xy, 0.5)?
        .plus_scaled(&x_xy, 1.0 / 12.0)?
        .plus_scaled(&y_xy, -1.0 / 12.0)?
        .plus_scaled(&y_x_xy, -1.0 / 24.0)
}

/// `log(e^{A/2} e^{B} e^{A/2})` as two nested [`bch`] calls.
pub fn symmetric_bch(a: &GradedSeries, b: &GradedSeries) -> Result<GradedSeries> {
    let half = a.scaled(0.5);
    bch(&bch(&half, b)?, &half)
}

/// The exponent `Z(tau)` of one Trotter cycle, `T(tau) = exp(Z)`, with
/// `A = -i H1 tau`, `B = -i H2 tau` at grading degree one.
pub fn cycle_exponent(p: &ModelParams) -> Result<GradedSeries> {
    let minus_i = Complex64::new(0.0, -1.0);
    let a = GradedSeries::homogeneous(build_h1(p)?.scaled(minus_i), 1);
    let b = GradedSeries::homogeneous(build_h2(p)?.scaled(minus_i), 1);
    symmetric_bch(&a, &b)
}

/// Order-by-order effective Hamiltonian terms `h^{(2l)}`, `l = 0..=max_k`,
/// with `H_F = sum_l tau^{2l} h^{(2l)}`. They are independent of `tau`.
pub fn effective_hamiltonian_terms(p: &ModelParams, max_k: usize) -> Result<Vec<PauliOperator>> {
    if 2 * max_k + 1 > MAX_DEGREE {
        return Err(Error::UnsupportedOrder(max_k));
    }
    let z = cycle_exponent(p)?;
    let i = Complex64::new(0.0, 1.0);
    Ok((0..=max_k).map(|l| z.component(2 * l + 1).scaled(i)).collect())
}

/// Truncated effective Hamiltonian `H_F^{(2k)}` for `k` in `{0, 1}`.
pub fn magnus_truncation(p: &ModelParams, k: usize) -> Result<PauliOperator> {
    if k > 1 {
        return Err(Error::UnsupportedOrder(k));
    }
    let terms = effective_hamiltonian_terms(p, k)?;
    let mut out = PauliOperator::zero(p.n_sites);
    for (l, h) in terms.iter().enumerate() {
        out = out.plus_scaled(h, Complex64::new(p.tau.powi(2 * l as i32), 0.0))?;
    }
    Ok(out)
}
