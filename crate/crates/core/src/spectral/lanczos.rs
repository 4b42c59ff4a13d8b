//! Restarted Lanczos for the lowest eigenpair of a real symmetric operator,
//! with full reorthogonalization against the current Krylov basis.

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::sym_eigen;

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            krylov_dim: 80,
            max_restarts: 60,
            tolerance: 1e-11,
            seed: 0x5eed,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Lowest eigenpair of the operator `apply` on `R^dim`. The residual
/// `|H v - E v|` of the returned pair is below `opts.tolerance * max(1, |E|)`.
pub fn lowest_eigenpair<F>(dim: usize, apply: F, opts: &LanczosOptions) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if dim == 0 {
        return Err(Error::InvalidArgument("empty operator".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    normalize(&mut start);
    let m_max = opts.krylov_dim.min(dim).max(1);
    let mut residual = f64::INFINITY;
    for _ in 0..=opts.max_restarts {
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for j in 0..m_max {
            let mut w = apply(&basis[j])?;
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            // Two passes of classical Gram-Schmidt against the whole basis.
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(&w, q);
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            if j + 1 == m_max {
                break;
            }
            let b = normalize(&mut w);
            if b < 1e-13 {
                break;
            }
            beta.push(b);
            basis.push(w);
        }
        let m = alpha.len();
        let t = Mat::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i == j + 1 {
                beta[j]
            } else if j == i + 1 {
                beta[i]
            } else {
                0.0
            }
        });
        let (_, vecs) = sym_eigen(&t)?;
        let mut ritz = vec![0.0; dim];
        for (k, q) in basis.iter().take(m).enumerate() {
            let c = vecs[(k, 0)];
            ritz.iter_mut().zip(q).for_each(|(x, y)| *x += c * y);
        }
        normalize(&mut ritz);
        let hv = apply(&ritz)?;
        let energy = dot(&hv, &ritz);
        residual = hv
            .iter()
            .zip(&ritz)
            .map(|(h, v)| (h - energy * v).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= opts.tolerance * energy.abs().max(1.0) || m == dim {
            return Ok((energy, ritz));
        }
        start = ritz;
    }
    Err(Error::NoConvergence {
        iterations: opts.max_restarts,
        residual,
    })
}
