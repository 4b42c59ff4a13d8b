//! Full-space state vectors and the Floquet propagators acting on them.

pub mod deformed;
pub mod floquet;
pub mod kernel;

use std::io::{Read, Write};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::pauli::{reflect_bits, rotate_bits, PauliOperator};

/// Largest chain held as a full amplitude vector (2^26 amplitudes = 1 GiB).
pub const MAX_STATE_SITES: usize = 26;

/// Tolerance on the imaginary part of a Hermitian expectation value.
pub const EXPECTATION_IM_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amps: Vec<Complex64>,
}

fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites == 0 || n_sites > MAX_STATE_SITES {
        return Err(Error::SizeGuard {
            what: "state vector",
            n_sites,
            max: MAX_STATE_SITES,
        });
    }
    Ok(())
}

impl StateVector {
    /// Computational basis state `|index>`; bit `j` is site `j`, 0 is spin up.
    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = 1usize << n_sites;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} outside 0..{dim}")));
        }
        let mut amps = vec![Complex64::default(); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_sites, amps })
    }

    pub fn all_up(n_sites: usize) -> Result<Self> {
        Self::basis(n_sites, 0)
    }

    /// Haar-like random state from a seeded Gaussian.
    pub fn random(n_sites: usize, seed: u64) -> Result<Self> {
        check_sites(n_sites)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1usize << n_sites)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        let mut s = Self { n_sites, amps };
        s.normalize()?;
        Ok(s)
    }

    /// Wrap amplitudes as given; call [`normalize`](Self::normalize) if needed.
    pub fn from_amplitudes(n_sites: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_sites(n_sites)?;
        if amps.len() != 1usize << n_sites {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_sites,
                found: amps.len(),
            });
        }
        Ok(Self { n_sites, amps })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same(other)?;
        Ok(kernel::inner(&self.amps, &other.amps, Exec::default()))
    }

    pub fn norm(&self) -> f64 {
        kernel::inner(&self.amps, &self.amps, Exec::default()).re.sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        let inv = 1.0 / n;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    /// `<psi|op|psi>` for a Hermitian operator.
    pub fn expectation(&self, op: &PauliOperator) -> Result<f64> {
        if op.n_sites() != self.n_sites {
            return Err(Error::LengthMismatch {
                left: self.n_sites,
                right: op.n_sites(),
            });
        }
        if !op.is_hermitian() {
            return Err(Error::InvalidArgument("expectation of a non-Hermitian operator".into()));
        }
        let applied = op.apply(&self.amps)?;
        let v = kernel::inner(&self.amps, &applied, Exec::default());
        if v.im.abs() > EXPECTATION_IM_TOLERANCE * (1.0 + v.re.abs()) {
            return Err(Error::InvalidArgument(format!(
                "expectation has imaginary part {:.3e}",
                v.im
            )));
        }
        Ok(v.re)
    }

    /// Translate every basis configuration by `shift` sites.
    pub fn translated(&self, shift: usize) -> Self {
        let mut amps = vec![Complex64::default(); self.dim()];
        for (b, a) in self.amps.iter().enumerate() {
            amps[rotate_bits(b as u64, shift, self.n_sites) as usize] = *a;
        }
        Self {
            n_sites: self.n_sites,
            amps,
        }
    }

    /// Mirror every basis configuration (site `j` to `L-1-j`).
    pub fn reflected(&self) -> Self {
        let mut amps = vec![Complex64::default(); self.dim()];
        for (b, a) in self.amps.iter().enumerate() {
            amps[reflect_bits(b as u64, self.n_sites) as usize] = *a;
        }
        Self {
            n_sites: self.n_sites,
            amps,
        }
    }

    /// Binary snapshot: `u32` site count, `u64` amplitude count, then
    /// little-endian `f64` pairs `(re, im)`.
    pub fn write_snapshot<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.n_sites as u32).to_le_bytes())?;
        w.write_all(&(self.amps.len() as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.amps.len() * 16);
        for a in &self.amps {
            buf.extend_from_slice(&a.re.to_le_bytes());
            buf.extend_from_slice(&a.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_snapshot<R: Read>(mut r: R) -> Result<Self> {
        let mut h4 = [0u8; 4];
        let mut h8 = [0u8; 8];
        r.read_exact(&mut h4)?;
        r.read_exact(&mut h8)?;
        let n_sites = u32::from_le_bytes(h4) as usize;
        let count = u64::from_le_bytes(h8);
        check_sites(n_sites)?;
        if count != 1u64 << n_sites {
            return Err(Error::Snapshot(format!(
                "header declares {count} amplitudes for L={n_sites}"
            )));
        }
        let mut bytes = vec![0u8; count as usize * 16];
        r.read_exact(&mut bytes)
            .map_err(|e| Error::Snapshot(format!("truncated amplitude block: {e}")))?;
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(Error::Snapshot("trailing bytes after amplitudes".into()));
        }
        let f = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("8-byte chunk"));
        let amps = bytes
            .chunks_exact(16)
            .map(|c| Complex64::new(f(&c[..8]), f(&c[8..])))
            .collect();
        Ok(Self { n_sites, amps })
    }
}
