//! Dense real and split-complex linear algebra on top of `faer`.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use crate::error::{Error, Result};

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a real
/// symmetric matrix; only the lower triangle is read.
pub fn sym_eigen(m: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::Eigendecomposition)?;
    let s = evd.S().column_vector();
    let vals = (0..m.nrows()).map(|i| s[i]).collect();
    Ok((vals, evd.U().to_owned()))
}

pub fn sym_eigenvalues(m: &Mat<f64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::Eigendecomposition)
}

/// `V diag(f) V^T`.
pub fn spectral_function_of(vecs: &Mat<f64>, f: &[f64]) -> Mat<f64> {
    let scaled = Mat::from_fn(vecs.nrows(), vecs.ncols(), |i, j| vecs[(i, j)] * f[j]);
    &scaled * vecs.transpose()
}

/// `V^T M V`.
pub fn congruence(vecs: &Mat<f64>, m: &Mat<f64>) -> Mat<f64> {
    let mv = m * vecs;
    vecs.transpose() * &mv
}

pub fn symmetrize(m: &mut Mat<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

pub fn max_abs(m: &Mat<f64>) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(m[(i, j)].abs());
        }
    }
    out
}

pub fn frobenius(m: &Mat<f64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc += m[(i, j)] * m[(i, j)];
        }
    }
    acc.sqrt()
}

/// Complex matrix stored as separate real and imaginary parts, so that every
/// product runs through real GEMM.
#[derive(Clone, Debug)]
pub struct SplitComplex {
    pub re: Mat<f64>,
    pub im: Mat<f64>,
}

impl SplitComplex {
    pub fn identity(n: usize) -> Self {
        Self {
            re: Mat::identity(n, n),
            im: Mat::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.re.nrows()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let re = &self.re * &other.re - &self.im * &other.im;
        let im = &self.re * &other.im + &self.im * &other.re;
        Self { re, im }
    }

    /// `exp(-i t H)` for real symmetric `H = V diag(vals) V^T`.
    pub fn exp_minus_i(vals: &[f64], vecs: &Mat<f64>, t: f64) -> Self {
        let c: Vec<f64> = vals.iter().map(|l| (l * t).cos()).collect();
        let s: Vec<f64> = vals.iter().map(|l| -(l * t).sin()).collect();
        Self {
            re: spectral_function_of(vecs, &c),
            im: spectral_function_of(vecs, &s),
        }
    }

    /// `V^T M V` for real orthogonal `V`.
    pub fn congruence(&self, vecs: &Mat<f64>) -> Self {
        Self {
            re: congruence(vecs, &self.re),
            im: congruence(vecs, &self.im),
        }
    }

    /// Largest entry of `|M M^dagger - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let rt = self.re.transpose();
        let it = self.im.transpose();
        let mut re = &self.re * rt + &self.im * it;
        let im = &self.im * rt - &self.re * it;
        for i in 0..re.nrows() {
            re[(i, i)] -= 1.0;
        }
        max_abs(&re).max(max_abs(&im))
    }
}

/// Tolerance on `|A^2 + B^2 - I|` and `|AB - BA|` for a symmetric unitary.
pub const UNITARY_TOLERANCE: f64 = 1e-9;

/// Eigendecomposition of a complex-symmetric unitary `U = A + iB`.
///
/// Such a matrix has real orthonormal eigenvectors. With a global phase
/// `e^{i phi}` chosen so that no eigenvalue sits near `-1`, the real symmetric
/// matrix `-B' (I + A')^{-1}` has eigenvalues `tan(theta'/2)`, which separate
/// distinct quasienergies. Phases are read back from the Rayleigh quotients,
/// `theta = -atan2(v^T B v, v^T A v)` in `[-pi, pi)`, sorted ascending.
pub fn symmetric_unitary_eigen(u: &SplitComplex) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = u.dim();
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            asym = asym
                .max((u.re[(i, j)] - u.re[(j, i)]).abs())
                .max((u.im[(i, j)] - u.im[(j, i)]).abs());
        }
    }
    let dev = u.unitarity_deviation();
    if asym > UNITARY_TOLERANCE || dev > UNITARY_TOLERANCE {
        return Err(Error::NonUnitary(dev.max(asym)));
    }

    const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;
    let budget = 4.0 * n as f64 + 8.0;
    let mut best: Option<(f64, Mat<f64>)> = None;
    for attempt in 0..12 {
        let phi = attempt as f64 * GOLDEN_ANGLE;
        let (c, s) = (phi.cos(), phi.sin());
        // U' = e^{i phi} U
        let ap = Mat::from_fn(n, n, |i, j| {
            c * u.re[(i, j)] - s * u.im[(i, j)] + if i == j { 1.0 } else { 0.0 }
        });
        let bp = Mat::from_fn(n, n, |i, j| s * u.re[(i, j)] + c * u.im[(i, j)]);
        let Ok(llt) = ap.llt(Side::Lower) else {
            continue;
        };
        let mut h = -llt.solve(&bp);
        symmetrize(&mut h);
        let norm = frobenius(&h);
        if !norm.is_finite() {
            continue;
        }
        let better = best.as_ref().map_or(true, |(b, _)| norm < *b);
        if better {
            best = Some((norm, h));
        }
        if norm <= budget {
            break;
        }
    }
    let (_, h) = best.ok_or(Error::Eigendecomposition)?;
    let (_, vecs) = sym_eigen(&h)?;

    let av = &u.re * &vecs;
    let bv = &u.im * &vecs;
    let mut pairs: Vec<(f64, usize)> = (0..n)
        .map(|k| {
            let mut a = 0.0;
            let mut b = 0.0;
            for i in 0..n {
                a += vecs[(i, k)] * av[(i, k)];
                b += vecs[(i, k)] * bv[(i, k)];
            }
            (fold_angle(-b.atan2(a)), k)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let thetas = pairs.iter().map(|p| p.0).collect();
    let sorted = Mat::from_fn(n, n, |i, k| vecs[(i, pairs[k].1)]);
    Ok((thetas, sorted))
}

/// Fold an angle into `[-pi, pi)`.
pub fn fold_angle(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    if (-PI..PI).contains(&x) {
        return x;
    }
    let mut y = (x + PI).rem_euclid(TAU) - PI;
    if y >= PI {
        y -= TAU;
    }
    y
}
