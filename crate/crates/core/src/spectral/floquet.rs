use faer::Mat;
use num_complex::Complex64;

use super::lanczos::{lowest_eigenpair, LanczosOptions};
use super::sector::{SectorBasis, SectorOperator, DENSE_SECTOR_MAX_SITES};
use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, symmetric_unitary_eigen, SplitComplex};
use crate::par::Exec;
use crate::pauli::bch::magnus_truncation;
use crate::pauli::model::{build_drive_k, build_h0, build_h1, build_h2, magnetization_z, ModelParams};
use crate::pauli::PauliOperator;

/// Quasienergy gaps below this are reported as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// Largest chain for the `delta U` matrix.
pub const DELTA_U_MAX_SITES: usize = 14;

/// Residual bound required of every returned eigenpair.
pub const EIGEN_RESIDUAL_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Want {
    GroundOnly,
    Full,
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub index: usize,
    pub energy: f64,
    /// Sector coordinates, unit norm.
    pub vector: Vec<f64>,
}

/// Complete dense eigensystem of a sector operator, energies ascending.
#[derive(Clone, Debug)]
pub struct EffectiveSpectrum {
    pub energies: Vec<f64>,
    pub vectors: Mat<f64>,
}

impl EffectiveSpectrum {
    pub fn new(op: &PauliOperator, basis: &SectorBasis) -> Result<Self> {
        let m = SectorOperator::new(op, basis)?.to_dense()?;
        let (energies, vectors) = sym_eigen(&m)?;
        Ok(Self { energies, vectors })
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.vectors.nrows()).map(|i| self.vectors[(i, j)]).collect()
    }

    pub fn pair(&self, j: usize) -> EigenPair {
        EigenPair {
            index: j,
            energy: self.energies[j],
            vector: self.vector(j),
        }
    }

    /// Index of the state with energy closest to zero.
    pub fn mid_index(&self) -> usize {
        (0..self.len())
            .min_by(|&a, &b| self.energies[a].abs().total_cmp(&self.energies[b].abs()))
            .unwrap_or(0)
    }
}

fn residual(op: &SectorOperator, e: f64, v: &[f64]) -> Result<f64> {
    let hv = op.apply(v, Exec::default())?;
    Ok(hv.iter().zip(v).map(|(h, x)| (h - e * x).powi(2)).sum::<f64>().sqrt())
}

/// Eigenpairs of a Hermitian, group-invariant operator in the sector.
///
/// `GroundOnly` runs matrix-free Lanczos; `Full` diagonalizes the dense
/// sector matrix (`L <= 16`).
pub fn eigensystem_effective(op: &PauliOperator, basis: &SectorBasis, want: Want) -> Result<Vec<EigenPair>> {
    let so = SectorOperator::new(op, basis)?;
    let pairs = match want {
        Want::GroundOnly => {
            let (energy, vector) =
                lowest_eigenpair(so.dim(), |v| so.apply(v, Exec::default()), &LanczosOptions::default())?;
            vec![EigenPair {
                index: 0,
                energy,
                vector,
            }]
        }
        Want::Full => {
            if basis.n_sites() > DENSE_SECTOR_MAX_SITES {
                return Err(Error::SizeGuard {
                    what: "full effective spectrum",
                    n_sites: basis.n_sites(),
                    max: DENSE_SECTOR_MAX_SITES,
                });
            }
            let spec = EffectiveSpectrum::new(op, basis)?;
            (0..spec.len()).map(|j| spec.pair(j)).collect()
        }
    };
    let scale = op.spectral_norm_bound().max(1.0);
    for p in &pairs {
        let r = residual(&so, p.energy, &p.vector)?;
        if r > EIGEN_RESIDUAL_TOLERANCE * scale {
            return Err(Error::NoConvergence {
                iterations: 0,
                residual: r,
            });
        }
    }
    Ok(pairs)
}

/// Floquet eigensystem in the sector: `U |theta> = e^{-i theta} |theta>`.
#[derive(Clone, Debug)]
pub struct FloquetEigensystem {
    pub n_sites: usize,
    pub tau: f64,
    /// Ascending, in `[-pi, pi)`.
    pub quasienergies: Vec<f64>,
    /// Real orthonormal columns in sector coordinates.
    pub vectors: Mat<f64>,
    /// `<theta|m_z|theta>`.
    pub magnetization: Vec<f64>,
    /// `c_alpha = <theta_alpha|psi_ref>`.
    pub overlaps: Vec<f64>,
    /// Smallest circular gap between quasienergies.
    pub min_gap: f64,
}

impl FloquetEigensystem {
    pub fn from_unitary(n_sites: usize, tau: f64, u: &SplitComplex, mz: &[f64], reference: &[f64]) -> Result<Self> {
        if reference.len() != u.dim() || mz.len() != u.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                found: reference.len().min(mz.len()),
            });
        }
        let (quasienergies, vectors) = symmetric_unitary_eigen(u)?;
        let d = quasienergies.len();
        let magnetization = (0..d)
            .map(|a| (0..d).map(|i| vectors[(i, a)].powi(2) * mz[i]).sum())
            .collect();
        let mut s = Self {
            n_sites,
            tau,
            min_gap: min_circular_gap(&quasienergies),
            quasienergies,
            vectors,
            magnetization,
            overlaps: Vec::new(),
        };
        s.overlaps = s.overlaps_with(reference);
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.quasienergies.len()
    }

    /// `<theta_alpha|v>` for every alpha.
    pub fn overlaps_with(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|a| (0..d).map(|i| self.vectors[(i, a)] * v[i]).sum())
            .collect()
    }

    pub fn is_degenerate(&self) -> bool {
        self.min_gap < DEGENERACY_TOLERANCE
    }

    /// Exact `F(n) = |sum_alpha |c_alpha|^2 e^{-i theta_alpha n}|^2` for the reference.
    pub fn fidelity_series(&self, n_max: usize) -> Vec<f64> {
        let w: Vec<f64> = self.overlaps.iter().map(|c| c * c).collect();
        (0..=n_max)
            .map(|n| {
                let mut acc = Complex64::default();
                for (wa, th) in w.iter().zip(&self.quasienergies) {
                    acc += Complex64::from_polar(*wa, -th * n as f64);
                }
                acc.norm_sqr()
            })
            .collect()
    }
}

fn min_circular_gap(sorted: &[f64]) -> f64 {
    if sorted.len() < 2 {
        return f64::INFINITY;
    }
    let inner = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let wrap = sorted[0] + std::f64::consts::TAU - sorted[sorted.len() - 1];
    inner.min(wrap)
}

/// Reusable pieces of the sector Floquet cycle; only the phases depend on `tau`.
///
/// With `D = diag(e^{-i E1 tau/2})` and `H2 = V diag(lambda) V^T`,
/// `T(tau) = D (C + i S) D` where `C = V cos(lambda tau) V^T`, `S = -V sin(lambda tau) V^T`.
#[derive(Clone, Debug)]
pub struct SectorFloquetBuilder {
    n_sites: usize,
    e1: Vec<f64>,
    h2_vals: Vec<f64>,
    h2_vecs: Mat<f64>,
    mz: Vec<f64>,
}

impl SectorFloquetBuilder {
    pub fn new(p: &ModelParams, basis: &SectorBasis) -> Result<Self> {
        if basis.n_sites() != p.n_sites {
            return Err(Error::LengthMismatch {
                left: p.n_sites,
                right: basis.n_sites(),
            });
        }
        if p.n_sites > DENSE_SECTOR_MAX_SITES {
            return Err(Error::SizeGuard {
                what: "sector Floquet unitary",
                n_sites: p.n_sites,
                max: DENSE_SECTOR_MAX_SITES,
            });
        }
        let e1 = basis.diagonal(&build_h1(p)?)?;
        let h2 = SectorOperator::new(&build_h2(p)?, basis)?.to_dense()?;
        let (h2_vals, h2_vecs) = sym_eigen(&h2)?;
        let mz = basis.diagonal(&magnetization_z(p.n_sites))?;
        Ok(Self {
            n_sites: p.n_sites,
            e1,
            h2_vals,
            h2_vecs,
            mz,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn magnetization_diagonal(&self) -> &[f64] {
        &self.mz
    }

    pub fn unitary(&self, tau: f64) -> SplitComplex {
        let cs = SplitComplex::exp_minus_i(&self.h2_vals, &self.h2_vecs, tau);
        let d = self.e1.len();
        let phi = |i: usize, j: usize| -(self.e1[i] + self.e1[j]) * tau / 2.0;
        SplitComplex {
            re: Mat::from_fn(d, d, |i, j| {
                let (s, c) = phi(i, j).sin_cos();
                c * cs.re[(i, j)] - s * cs.im[(i, j)]
            }),
            im: Mat::from_fn(d, d, |i, j| {
                let (s, c) = phi(i, j).sin_cos();
                s * cs.re[(i, j)] + c * cs.im[(i, j)]
            }),
        }
    }

    pub fn eigensystem(&self, tau: f64, reference: &[f64]) -> Result<FloquetEigensystem> {
        FloquetEigensystem::from_unitary(self.n_sites, tau, &self.unitary(tau), &self.mz, reference)
    }
}

/// Floquet eigensystem of `T(tau)` with overlaps against `reference`.
pub fn floquet_eigensystem(p: &ModelParams, basis: &SectorBasis, reference: &EigenPair) -> Result<FloquetEigensystem> {
    SectorFloquetBuilder::new(p, basis)?.eigensystem(p.tau, &reference.vector)
}

/// Sector matrix of the deformed cycle
/// `e^{-i(H0+eps K)tau/2} e^{-i(H0-eps K)tau} e^{-i(H0+eps K)tau/2}`.
pub fn deformed_sector_unitary(p: &ModelParams, epsilon: f64, basis: &SectorBasis) -> Result<SplitComplex> {
    if p.n_sites > DENSE_SECTOR_MAX_SITES {
        return Err(Error::SizeGuard {
            what: "sector deformed unitary",
            n_sites: p.n_sites,
            max: DENSE_SECTOR_MAX_SITES,
        });
    }
    let h0 = build_h0(p)?;
    let k = build_drive_k(p)?;
    let eps = Complex64::new(epsilon, 0.0);
    let plus = SectorOperator::new(&h0.plus_scaled(&k, eps)?, basis)?.to_dense()?;
    let minus = SectorOperator::new(&h0.plus_scaled(&k, -eps)?, basis)?.to_dense()?;
    let (vp, qp) = sym_eigen(&plus)?;
    let (vm, qm) = sym_eigen(&minus)?;
    let half = SplitComplex::exp_minus_i(&vp, &qp, p.tau / 2.0);
    let full = SplitComplex::exp_minus_i(&vm, &qm, p.tau);
    Ok(half.matmul(&full).matmul(&half))
}

/// `<E_j'|delta U|E_j>` with `delta U = e^{i H_F^{(2k)} tau} T(tau)` in the
/// eigenbasis of the truncated effective Hamiltonian.
#[derive(Clone, Debug)]
pub struct DeltaUMatrix {
    pub tau: f64,
    pub order: usize,
    pub energies: Vec<f64>,
    pub eigenvectors: Mat<f64>,
    /// Entry `(j', j)`.
    pub elements: SplitComplex,
}

impl DeltaUMatrix {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        Complex64::new(self.elements.re[(row, col)], self.elements.im[(row, col)])
    }

    pub fn abs_sqr(&self, row: usize, col: usize) -> f64 {
        self.element(row, col).norm_sqr()
    }

    /// Zeroth-order quasienergies `E_j tau`.
    pub fn thetas(&self) -> Vec<f64> {
        self.energies.iter().map(|e| e * self.tau).collect()
    }
}

pub fn delta_u_matrix(p: &ModelParams, k: usize, basis: &SectorBasis) -> Result<DeltaUMatrix> {
    if p.n_sites > DELTA_U_MAX_SITES {
        return Err(Error::SizeGuard {
            what: "delta U matrix",
            n_sites: p.n_sites,
            max: DELTA_U_MAX_SITES,
        });
    }
    let hf = magnus_truncation(p, k)?;
    let spec = EffectiveSpectrum::new(&hf, basis)?;
    let t = SectorFloquetBuilder::new(p, basis)?.unitary(p.tau);
    let inner = t.congruence(&spec.vectors);
    let d = spec.len();
    let mut re = Mat::zeros(d, d);
    let mut im = Mat::zeros(d, d);
    for row in 0..d {
        let (s, c) = (spec.energies[row] * p.tau).sin_cos();
        for col in 0..d {
            let (a, b) = (inner.re[(row, col)], inner.im[(row, col)]);
            re[(row, col)] = c * a - s * b;
            im[(row, col)] = s * a + c * b;
        }
    }
    Ok(DeltaUMatrix {
        tau: p.tau,
        order: k,
        energies: spec.energies,
        eigenvectors: spec.vectors,
        elements: SplitComplex { re, im },
    })
}
