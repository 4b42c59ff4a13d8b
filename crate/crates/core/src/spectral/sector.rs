//! Zero-momentum, even-parity sector of the periodic chain.
//!
//! Each sector vector is the normalized uniform superposition over one orbit
//! of the dihedral group (translations and the mirror). Every orbit yields
//! exactly one such vector, so the sector dimension is the orbit count.

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::pauli::{reflect_bits, rotate_bits, PauliOperator, PauliString, HERMITIAN_TOLERANCE};
use crate::state::{StateVector, MAX_STATE_SITES};

const NOT_SET: u32 = u32::MAX;

/// Largest chain for which a dense sector matrix is assembled.
pub const DENSE_SECTOR_MAX_SITES: usize = 16;

#[derive(Clone, Debug)]
pub struct SectorBasis {
    n_sites: usize,
    reps: Vec<u64>,
    orbit_sizes: Vec<u32>,
    index: Vec<u32>,
}

/// All `2L` images of `b` under the dihedral group.
fn dihedral_images(b: u64, n: usize) -> impl Iterator<Item = u64> {
    let r = reflect_bits(b, n);
    (0..n).flat_map(move |m| [rotate_bits(b, m, n), rotate_bits(r, m, n)])
}

impl SectorBasis {
    pub fn new(n_sites: usize) -> Result<Self> {
        if !(2..=MAX_STATE_SITES).contains(&n_sites) {
            return Err(Error::InvalidParams(format!(
                "sector requires 2 <= L <= {MAX_STATE_SITES}, got {n_sites}"
            )));
        }
        let dim = 1usize << n_sites;
        let mut index = vec![NOT_SET; dim];
        let mut reps = Vec::new();
        let mut orbit_sizes = Vec::new();
        let mut orbit = Vec::with_capacity(2 * n_sites);
        // Scanning in increasing order makes the first unseen state the
        // smallest member of its orbit.
        for b in 0..dim as u64 {
            if index[b as usize] != NOT_SET {
                continue;
            }
            let id = reps.len() as u32;
            orbit.clear();
            for s in dihedral_images(b, n_sites) {
                if index[s as usize] == NOT_SET {
                    index[s as usize] = id;
                    orbit.push(s);
                }
            }
            reps.push(b);
            orbit_sizes.push(orbit.len() as u32);
        }
        Ok(Self {
            n_sites,
            reps,
            orbit_sizes,
            index,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn representatives(&self) -> &[u64] {
        &self.reps
    }

    pub fn orbit_sizes(&self) -> &[u32] {
        &self.orbit_sizes
    }

    /// Sector index of the orbit containing basis state `b`.
    pub fn orbit_of(&self, b: u64) -> usize {
        self.index[b as usize] as usize
    }

    /// Full-space state of sector coordinates `v`.
    pub fn lift(&self, v: &[f64]) -> Result<StateVector> {
        self.check_len(v.len())?;
        let norms: Vec<f64> = self.orbit_sizes.iter().map(|&s| 1.0 / (s as f64).sqrt()).collect();
        let amps = self
            .index
            .iter()
            .map(|&r| Complex64::new(v[r as usize] * norms[r as usize], 0.0))
            .collect();
        StateVector::from_amplitudes(self.n_sites, amps)
    }

    pub fn lift_complex(&self, v: &[Complex64]) -> Result<StateVector> {
        self.check_len(v.len())?;
        let amps = self
            .index
            .iter()
            .map(|&r| v[r as usize] / (self.orbit_sizes[r as usize] as f64).sqrt())
            .collect();
        StateVector::from_amplitudes(self.n_sites, amps)
    }

    /// Sector coordinates `<r~|psi>`; the component outside the sector is dropped.
    pub fn project(&self, state: &StateVector) -> Result<Vec<Complex64>> {
        if state.n_sites() != self.n_sites {
            return Err(Error::LengthMismatch {
                left: self.n_sites,
                right: state.n_sites(),
            });
        }
        let mut out = vec![Complex64::default(); self.dim()];
        for (b, a) in state.amplitudes().iter().enumerate() {
            out[self.index[b] as usize] += a;
        }
        for (o, &s) in out.iter_mut().zip(&self.orbit_sizes) {
            *o /= (s as f64).sqrt();
        }
        Ok(out)
    }

    /// Per-sector-state value of a diagonal operator invariant under the group.
    pub fn diagonal(&self, op: &PauliOperator) -> Result<Vec<f64>> {
        if !op.is_diagonal() {
            return Err(Error::NotDiagonal);
        }
        let so = SectorOperator::new(op, self)?;
        Ok(self
            .reps
            .iter()
            .map(|&r| {
                so.terms
                    .iter()
                    .map(|t| if (t.z & r).count_ones() % 2 == 0 { t.c } else { -t.c })
                    .sum()
            })
            .collect())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }
}

fn reflect_string(s: &PauliString, n: usize) -> PauliString {
    PauliString::from_masks(reflect_bits(s.x_mask(), n), reflect_bits(s.z_mask(), n))
}

/// True when `op` is unchanged by a one-site translation and by the mirror.
pub fn is_sector_invariant(op: &PauliOperator) -> bool {
    let n = op.n_sites();
    let close = |other: &PauliOperator| {
        other
            .minus(op)
            .map(|d| d.spectral_norm_bound() <= HERMITIAN_TOLERANCE * (1.0 + op.spectral_norm_bound()))
            .unwrap_or(false)
    };
    let mirrored = PauliOperator::from_terms(n, op.terms().map(|(s, c)| (reflect_string(s, n), *c)));
    close(&op.translated(1)) && mirrored.map(|m| close(&m)).unwrap_or(false)
}

#[derive(Clone, Copy, Debug)]
struct RealTerm {
    x: u64,
    z: u64,
    c: f64,
}

/// A real-symmetric, group-invariant operator restricted to the sector.
#[derive(Clone, Debug)]
pub struct SectorOperator<'a> {
    basis: &'a SectorBasis,
    terms: Vec<RealTerm>,
}

impl<'a> SectorOperator<'a> {
    pub fn new(op: &PauliOperator, basis: &'a SectorBasis) -> Result<Self> {
        if op.n_sites() != basis.n_sites {
            return Err(Error::LengthMismatch {
                left: basis.n_sites,
                right: op.n_sites(),
            });
        }
        if !op.is_real_symmetric() {
            return Err(Error::NotRealSymmetric(
                "sector operators must be real symmetric".into(),
            ));
        }
        if !is_sector_invariant(op) {
            return Err(Error::InvalidArgument(
                "operator does not commute with translation and reflection".into(),
            ));
        }
        let terms = op
            .terms()
            .map(|(s, c)| {
                // The string's phase i^{#Y} is +-1 for even #Y.
                let sign = if s.y_count() % 4 == 0 { 1.0 } else { -1.0 };
                RealTerm {
                    x: s.x_mask(),
                    z: s.z_mask(),
                    c: c.re * sign,
                }
            })
            .collect();
        Ok(Self { basis, terms })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `(row, col, value)` contributions of row `q`; duplicates are summed by callers.
    fn row(&self, q: usize, mut f: impl FnMut(usize, f64)) {
        let b = self.basis.reps[q];
        let sq = self.basis.orbit_sizes[q] as f64;
        for t in &self.terms {
            let sign = if (t.z & b).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            let target = b ^ t.x;
            let r = self.basis.index[target as usize] as usize;
            let sr = self.basis.orbit_sizes[r] as f64;
            f(r, t.c * sign * (sq / sr).sqrt());
        }
    }

    /// Matrix-free product `out = H v`.
    pub fn apply(&self, v: &[f64], exec: Exec) -> Result<Vec<f64>> {
        self.basis.check_len(v.len())?;
        Ok(par::map_collect(self.dim(), exec, |q| {
            let mut acc = 0.0;
            self.row(q, |r, m| acc += m * v[r]);
            acc
        }))
    }

    /// `<v|A|v>` for real sector coordinates `v`.
    pub fn expectation(&self, v: &[f64], exec: Exec) -> Result<f64> {
        let av = self.apply(v, exec)?;
        Ok(av.iter().zip(v).map(|(a, b)| a * b).sum())
    }

    pub fn to_dense(&self) -> Result<Mat<f64>> {
        if self.basis.n_sites > DENSE_SECTOR_MAX_SITES {
            return Err(Error::SizeGuard {
                what: "dense sector matrix",
                n_sites: self.basis.n_sites,
                max: DENSE_SECTOR_MAX_SITES,
            });
        }
        let d = self.dim();
        let mut m = Mat::<f64>::zeros(d, d);
        for q in 0..d {
            self.row(q, |r, v| m[(q, r)] += v);
        }
        Ok(m)
    }
}

/// Dimension of one symmetry block, from characters and fixed-point counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SectorCount {
    pub momentum: usize,
    /// Mirror eigenvalue for the self-conjugate momenta 0 and `L/2`.
    pub parity: Option<i8>,
    pub dim: usize,
}

/// Dimensions of every momentum block, split by parity where the mirror
/// preserves momentum. Counts come from the projector traces
/// `dim = |G|^{-1} sum_g chi(g)^* fix(g)` with brute-force fixed points.
pub fn sector_dimensions(n_sites: usize) -> Result<Vec<SectorCount>> {
    if !(2..=20).contains(&n_sites) {
        return Err(Error::InvalidParams(format!(
            "sector counting needs 2 <= L <= 20, got {n_sites}"
        )));
    }
    let n = n_sites;
    let dim = 1u64 << n;
    let fix_t: Vec<f64> = (0..n)
        .map(|m| (0..dim).filter(|&b| rotate_bits(b, m, n) == b).count() as f64)
        .collect();
    let fix_tr: Vec<f64> = (0..n)
        .map(|m| (0..dim).filter(|&b| rotate_bits(reflect_bits(b, n), m, n) == b).count() as f64)
        .collect();
    let mut out = Vec::new();
    for k in 0..n {
        let phase = |m: usize| 2.0 * std::f64::consts::PI * (k * m) as f64 / n as f64;
        let trans: f64 = (0..n).map(|m| phase(m).cos() * fix_t[m]).sum();
        let self_conjugate = k == 0 || 2 * k == n;
        if self_conjugate {
            for p in [1i8, -1] {
                let mirror: f64 = (0..n).map(|m| phase(m).cos() * fix_tr[m]).sum();
                let total = (trans + p as f64 * mirror) / (2 * n) as f64;
                out.push(SectorCount {
                    momentum: k,
                    parity: Some(p),
                    dim: total.round() as usize,
                });
            }
        } else {
            out.push(SectorCount {
                momentum: k,
                parity: None,
                dim: (trans / n as f64).round() as usize,
            });
        }
    }
    Ok(out)
}
