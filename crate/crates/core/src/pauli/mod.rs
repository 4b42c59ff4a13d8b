//! Weighted Pauli-string algebra on a periodic chain.
//!
//! A [`PauliString`] is stored as two bit masks: bit `j` of `x` and `z` encodes
//! the letter on site `j` as `(0,0)=I`, `(1,0)=X`, `(0,1)=Z`, `(1,1)=Y`. The
//! string carries no phase; products return the phase as a power of `i`.
//!
//! Site `j` of a string is bit `j` of a computational basis index, and bit
//! value 0 is spin up (`Z|0> = +|0>`).

pub mod bch;
pub mod model;

use std::collections::BTreeMap;
use std::fmt;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients below this magnitude are dropped when simplifying.
pub const PRUNE_TOLERANCE: f64 = 1e-14;

/// Imaginary parts below this magnitude are accepted as Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Largest chain for which a dense `2^L x 2^L` matrix may be materialized.
pub const DENSE_MAX_SITES: usize = 14;

/// Largest chain representable by the bit-mask encoding.
pub const MAX_SITES: usize = 62;

/// Single-site Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (u64, u64) {
        match self {
            Pauli::I => (0, 0),
            Pauli::X => (1, 0),
            Pauli::Y => (1, 1),
            Pauli::Z => (0, 1),
        }
    }

    fn from_bits(x: u64, z: u64) -> Self {
        match (x & 1, z & 1) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Phase-free tensor product of single-site Pauli matrices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    x: u64,
    z: u64,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn from_masks(x: u64, z: u64) -> Self {
        Self { x, z }
    }

    pub fn single(site: usize, p: Pauli) -> Self {
        let (x, z) = p.bits();
        Self {
            x: x << site,
            z: z << site,
        }
    }

    pub fn from_sites(ops: &[(usize, Pauli)]) -> Self {
        ops.iter().fold(Self::IDENTITY, |acc, &(site, p)| {
            let s = Self::single(site, p);
            Self {
                x: acc.x ^ s.x,
                z: acc.z ^ s.z,
            }
        })
    }

    /// Parse a per-site letter string; character `j` is site `j`.
    pub fn from_letters(letters: &str) -> Result<Self> {
        if letters.len() > MAX_SITES {
            return Err(Error::InvalidArgument(format!(
                "Pauli string longer than {MAX_SITES} sites"
            )));
        }
        let mut ops = Vec::with_capacity(letters.len());
        for (site, ch) in letters.chars().enumerate() {
            let p = match ch.to_ascii_uppercase() {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::InvalidArgument(format!("invalid Pauli letter {other:?}"))),
            };
            ops.push((site, p));
        }
        Ok(Self::from_sites(&ops))
    }

    pub fn to_letters(&self, n_sites: usize) -> String {
        (0..n_sites).map(|j| self.letter(j).letter()).collect()
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn letter(&self, site: usize) -> Pauli {
        Pauli::from_bits(self.x >> site, self.z >> site)
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Highest occupied site plus one.
    pub fn support_len(&self) -> usize {
        64 - (self.x | self.z).leading_zeros() as usize
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Product `self * other = i^phase * result`, with `phase` in `0..4`.
    pub fn mul(&self, other: &Self) -> (u8, PauliString) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        // sigma(x,z) = i^{xz} X^x Z^z, and Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1
        let phase = (self.x & self.z).count_ones()
            + (other.x & other.z).count_ones()
            + 2 * (self.z & other.x).count_ones()
            + 4 * 64
            - (x & z).count_ones();
        ((phase % 4) as u8, PauliString { x, z })
    }

    /// Action on a computational basis state: `P|b> = amp |b'>`.
    #[inline]
    pub fn apply_to_basis(&self, b: u64) -> (Complex64, u64) {
        let exponent = (self.x & self.z).count_ones() + 2 * (self.z & b).count_ones();
        (i_power(exponent), b ^ self.x)
    }

    /// Cyclic translation by `shift` sites on a ring of `n_sites`.
    pub fn translated(&self, shift: usize, n_sites: usize) -> Self {
        Self {
            x: rotate_bits(self.x, shift, n_sites),
            z: rotate_bits(self.z, shift, n_sites),
        }
    }
}

pub(crate) fn i_power(exponent: u32) -> Complex64 {
    match exponent % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Rotate the low `n` bits of `b` so that bit `j` moves to bit `j + shift mod n`.
#[inline]
pub fn rotate_bits(b: u64, shift: usize, n: usize) -> u64 {
    let shift = shift % n;
    if shift == 0 {
        return b;
    }
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    ((b << shift) | (b >> (n - shift))) & mask
}

/// Mirror the low `n` bits of `b` (site `j` goes to site `n - 1 - j`).
#[inline]
pub fn reflect_bits(b: u64, n: usize) -> u64 {
    b.reverse_bits() >> (64 - n)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.support_len().max(1);
        write!(f, "{}", self.to_letters(n))
    }
}

/// Weighted sum of Pauli strings on `n_sites` sites.
///
/// Terms live in a `BTreeMap` so that iteration order, and therefore every
/// floating-point reduction over terms, is deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliOperator {
    n_sites: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    string: String,
    re: f64,
    im: f64,
}

impl PauliOperator {
    pub fn zero(n_sites: usize) -> Self {
        Self {
            n_sites,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_sites: usize) -> Self {
        let mut op = Self::zero(n_sites);
        op.add_term(PauliString::IDENTITY, Complex64::new(1.0, 0.0));
        op
    }

    pub fn from_terms(n_sites: usize, terms: impl IntoIterator<Item = (PauliString, Complex64)>) -> Result<Self> {
        let mut op = Self::zero(n_sites);
        for (s, c) in terms {
            if s.support_len() > n_sites {
                return Err(Error::LengthMismatch {
                    left: n_sites,
                    right: s.support_len(),
                });
            }
            op.add_term(s, c);
        }
        op.simplify();
        Ok(op)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, s: &PauliString) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    /// Accumulate `c * s` without pruning.
    pub fn add_term(&mut self, s: PauliString, c: Complex64) {
        *self.terms.entry(s).or_default() += c;
    }

    /// Drop terms whose coefficient magnitude is below [`PRUNE_TOLERANCE`].
    pub fn simplify(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_TOLERANCE);
    }

    pub fn simplified(mut self) -> Self {
        self.simplify();
        self
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let terms = self.terms.iter().map(|(s, c)| (*s, c * factor)).collect();
        Self {
            n_sites: self.n_sites,
            terms,
        }
        .simplified()
    }

    pub fn scaled_real(&self, factor: f64) -> Self {
        self.scaled(Complex64::new(factor, 0.0))
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.n_sites != other.n_sites {
            return Err(Error::LengthMismatch {
                left: self.n_sites,
                right: other.n_sites,
            });
        }
        Ok(())
    }

    /// `self + factor * other`, simplified.
    pub fn plus_scaled(&self, other: &Self, factor: Complex64) -> Result<Self> {
        self.check_len(other)?;
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(*s, c * factor);
        }
        Ok(out.simplified())
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.plus_scaled(other, Complex64::new(1.0, 0.0))
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.plus_scaled(other, Complex64::new(-1.0, 0.0))
    }

    /// Operator product `self * other`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let mut out = Self::zero(self.n_sites);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (phase, s) = a.mul(b);
                out.add_term(s, ca * cb * i_power(phase as u32));
            }
        }
        Ok(out.simplified())
    }

    /// Adjoint: conjugates every coefficient (Pauli strings are Hermitian).
    pub fn adjoint(&self) -> Self {
        let terms = self.terms.iter().map(|(s, c)| (*s, c.conj())).collect();
        Self {
            n_sites: self.n_sites,
            terms,
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms.values().all(|c| c.im.abs() <= HERMITIAN_TOLERANCE)
    }

    /// True when the matrix in the computational basis is real symmetric:
    /// Hermitian and free of strings with an odd number of `Y` letters.
    pub fn is_real_symmetric(&self) -> bool {
        self.terms.iter().all(|(s, c)| {
            if s.y_count() % 2 == 1 {
                c.norm() <= HERMITIAN_TOLERANCE
            } else {
                c.im.abs() <= HERMITIAN_TOLERANCE
            }
        })
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(PauliString::is_diagonal)
    }

    /// Sum of absolute coefficients, an upper bound on the spectral norm.
    pub fn spectral_norm_bound(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Translate every string by `shift` sites.
    pub fn translated(&self, shift: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(s, c)| (s.translated(shift, self.n_sites), *c))
            .collect();
        Self {
            n_sites: self.n_sites,
            terms,
        }
    }

    /// Real diagonal entries `<b|op|b>` for a diagonal Hermitian operator.
    pub fn diagonal_values(&self) -> Result<Vec<f64>> {
        if !self.is_diagonal() {
            return Err(Error::NotDiagonal);
        }
        if !self.is_hermitian() {
            return Err(Error::NotRealSymmetric("complex diagonal".into()));
        }
        if self.n_sites > crate::state::MAX_STATE_SITES {
            return Err(Error::SizeGuard {
                what: "diagonal tabulation",
                n_sites: self.n_sites,
                max: crate::state::MAX_STATE_SITES,
            });
        }
        let terms: Vec<(u64, f64)> = self.terms.iter().map(|(s, c)| (s.z, c.re)).collect();
        let mut out = vec![0.0; 1usize << self.n_sites];
        crate::par::for_each_chunk_mut(&mut out, 1 << 12, crate::par::Exec::default(), |offset, chunk| {
            for (i, v) in chunk.iter_mut().enumerate() {
                let b = (offset + i) as u64;
                *v = terms
                    .iter()
                    .map(|&(z, c)| if (z & b).count_ones() % 2 == 0 { c } else { -c })
                    .sum();
            }
        });
        Ok(out)
    }

    /// Apply to a full-space amplitude vector: `out = op * amps`.
    pub fn apply(&self, amps: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = 1usize << self.n_sites;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amps.len(),
            });
        }
        let terms: Vec<(PauliString, Complex64)> = self.terms.iter().map(|(s, c)| (*s, *c)).collect();
        let mut out = vec![Complex64::default(); dim];
        // <b|P|a> is nonzero only for a = b ^ x: gather form, rows are independent.
        crate::par::for_each_chunk_mut(&mut out, 1 << 12, crate::par::Exec::default(), |offset, chunk| {
            for (i, o) in chunk.iter_mut().enumerate() {
                let b = (offset + i) as u64;
                let mut acc = Complex64::default();
                for (s, c) in &terms {
                    let a = b ^ s.x;
                    let (amp, _) = s.apply_to_basis(a);
                    acc += c * amp * amps[a as usize];
                }
                *o = acc;
            }
        });
        Ok(out)
    }

    /// Dense `2^L x 2^L` matrix in the computational basis.
    pub fn to_dense(&self) -> Result<Mat<Complex64>> {
        if self.n_sites > DENSE_MAX_SITES {
            return Err(Error::SizeGuard {
                what: "dense operator matrix",
                n_sites: self.n_sites,
                max: DENSE_MAX_SITES,
            });
        }
        let dim = 1usize << self.n_sites;
        let mut m = Mat::<Complex64>::zeros(dim, dim);
        for (s, c) in &self.terms {
            for col in 0..dim {
                let (amp, row) = s.apply_to_basis(col as u64);
                m[(row as usize, col)] += c * amp;
            }
        }
        Ok(m)
    }

    /// Real part of [`to_dense`](Self::to_dense) for real-symmetric operators.
    pub fn to_dense_real(&self) -> Result<Mat<f64>> {
        if !self.is_real_symmetric() {
            return Err(Error::NotRealSymmetric("dense real realization requested".into()));
        }
        let m = self.to_dense()?;
        Ok(Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re))
    }

    pub fn to_json(&self) -> Result<String> {
        let records: Vec<TermRecord> = self
            .terms
            .iter()
            .map(|(s, c)| TermRecord {
                string: s.to_letters(self.n_sites),
                re: c.re,
                im: c.im,
            })
            .collect();
        Ok(serde_json::to_string_pretty(&records)?)
    }

    /// Parse the JSON term list; all strings must share one length.
    pub fn from_json(text: &str) -> Result<Self> {
        let records: Vec<TermRecord> = serde_json::from_str(text)?;
        let n_sites = records
            .first()
            .map(|r| r.string.len())
            .ok_or_else(|| Error::InvalidArgument("empty operator JSON carries no length".into()))?;
        let mut op = Self::zero(n_sites);
        for r in records {
            if r.string.len() != n_sites {
                return Err(Error::LengthMismatch {
                    left: n_sites,
                    right: r.string.len(),
                });
            }
            op.add_term(PauliString::from_letters(&r.string)?, Complex64::new(r.re, r.im));
        }
        Ok(op.simplified())
    }
}

/// `[a, b] = ab - ba`. Only anticommuting string pairs contribute, each as `2ab`.
pub fn commutator(a: &PauliOperator, b: &PauliOperator) -> Result<PauliOperator> {
    a.check_len(b)?;
    let mut out = PauliOperator::zero(a.n_sites);
    for (sa, ca) in &a.terms {
        for (sb, cb) in &b.terms {
            if sa.commutes_with(sb) {
                continue;
            }
            let (phase, s) = sa.mul(sb);
            out.add_term(s, 2.0 * ca * cb * i_power(phase as u32));
        }
    }
    Ok(out.simplified())
}
