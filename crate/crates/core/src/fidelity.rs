//! Fidelity traces and their time and spectral averages.
//!
//! Weights are `w_n = exp(-(n/sigma)^2)` for `n >= 0`, normalized by
//! `N_sigma = sum_{n>=0} w_n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::FloquetEigensystem;

/// Allowed overshoot of a fidelity above one.
pub const FIDELITY_OVERSHOOT: f64 = 1e-12;

/// Trace length per unit `sigma` required by the Gaussian time average.
pub const SIGMA_SPAN: f64 = 5.0;

/// Cutoff per unit `sigma` of the direct `D_sigma` sum.
pub const KERNEL_SPAN: f64 = 6.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub n_sites: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityTrace {
    pub tau: f64,
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

impl FidelityTrace {
    pub fn new(tau: f64, values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty fidelity trace".into()));
        }
        if (values[0] - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("F(0) = {} != 1", values[0])));
        }
        if let Some((n, f)) = values
            .iter()
            .enumerate()
            .find(|(_, f)| !(**f >= 0.0 && **f <= 1.0 + FIDELITY_OVERSHOOT))
        {
            return Err(Error::InvalidArgument(format!("F({n}) = {f} outside [0, 1]")));
        }
        Ok(Self {
            tau,
            values,
            provenance,
        })
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragedFidelity {
    pub sigma: f64,
    pub fbar: f64,
    pub normalization: f64,
    pub rate: f64,
}

/// Smallest `n_max` accepted for a given `sigma`.
pub fn required_n_max(sigma: f64) -> usize {
    (SIGMA_SPAN * sigma).ceil() as usize
}

/// `N_sigma = sum_{n>=0} exp(-(n/sigma)^2)`, summed until terms underflow
/// relative to the total.
pub fn gaussian_normalization(sigma: f64) -> f64 {
    let mut total = 0.0;
    let mut n = 0u64;
    loop {
        let w = (-(n as f64 / sigma).powi(2)).exp();
        if w < f64::EPSILON * 1e-3 * total {
            return total;
        }
        total += w;
        n += 1;
    }
}

/// `s = -ln(fbar) / L`.
pub fn rate_function(fbar: f64, n_sites: usize) -> f64 {
    -fbar.ln() / n_sites as f64
}

pub fn time_averaged_fidelity(trace: &FidelityTrace, sigma: f64) -> Result<AveragedFidelity> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("sigma={sigma}")));
    }
    let required = required_n_max(sigma);
    if trace.n_max() < required {
        return Err(Error::TraceTooShort {
            n_max: trace.n_max(),
            required,
            sigma,
        });
    }
    let normalization = gaussian_normalization(sigma);
    let sum: f64 = trace
        .values
        .iter()
        .enumerate()
        .map(|(n, f)| f * (-(n as f64 / sigma).powi(2)).exp())
        .sum();
    let fbar = sum / normalization;
    Ok(AveragedFidelity {
        sigma,
        fbar,
        normalization,
        rate: rate_function(fbar, trace.provenance.n_sites),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfiniteTimeFidelity {
    pub fbar: f64,
    pub rate: f64,
    pub min_gap: f64,
    /// Set when two quasienergies are closer than the degeneracy tolerance,
    /// where the diagonal-ensemble formula no longer holds.
    pub degenerate: bool,
}

/// `sum_alpha |<theta_alpha|E_j>|^4` and its rate.
pub fn infinite_time_fidelity(sys: &FloquetEigensystem, reference: &[f64]) -> Result<InfiniteTimeFidelity> {
    if reference.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: reference.len(),
        });
    }
    let fbar: f64 = sys.overlaps_with(reference).iter().map(|c| c.powi(4)).sum();
    Ok(InfiniteTimeFidelity {
        fbar,
        rate: rate_function(fbar, sys.n_sites),
        min_gap: sys.min_gap,
        degenerate: sys.is_degenerate(),
    })
}

/// Normalized Gaussian-window kernel
/// `D_sigma(x) = sum_{n>=0} w_n cos(n x) / sum_{n>=0} w_n`, by direct
/// summation over `n <= 6 sigma`.
#[derive(Clone, Debug)]
pub struct DSigmaKernel {
    sigma: f64,
    weights: Vec<f64>,
    total: f64,
}

/// Steps between exact resynchronizations of the rotation recurrence.
const RESYNC: usize = 64;

impl DSigmaKernel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma={sigma}")));
        }
        let n_cut = (KERNEL_SPAN * sigma).ceil() as usize;
        let weights: Vec<f64> = (0..=n_cut).map(|n| (-(n as f64 / sigma).powi(2)).exp()).collect();
        let total = weights.iter().sum();
        Ok(Self { sigma, weights, total })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn eval(&self, x: f64) -> f64 {
        use std::f64::consts::TAU;
        let x = x - TAU * (x / TAU).round();
        if x == 0.0 {
            return 1.0;
        }
        let (s1, c1) = x.sin_cos();
        let (mut c, mut s) = (1.0f64, 0.0f64);
        let mut acc = 0.0;
        for (n, w) in self.weights.iter().enumerate() {
            if n % RESYNC == 0 {
                (s, c) = (n as f64 * x).sin_cos();
            }
            acc += w * c;
            (c, s) = (c * c1 - s * s1, s * c1 + c * s1);
        }
        acc / self.total
    }
}

pub fn d_sigma_kernel(x: f64, sigma: f64) -> Result<f64> {
    Ok(DSigmaKernel::new(sigma)?.eval(x))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralAverage {
    pub sigma: f64,
    /// `sum_alpha |c_alpha|^4`.
    pub diagonal: f64,
    /// `2 sum_{alpha<beta} |c_alpha|^2 |c_beta|^2 D_sigma(theta_alpha - theta_beta)`.
    pub off_diagonal: f64,
    pub fbar: f64,
    pub rate: f64,
}

/// Gaussian-cutoff average evaluated from the Floquet eigensystem.
pub fn spectral_average_fidelity(sys: &FloquetEigensystem, reference: &[f64], sigma: f64) -> Result<SpectralAverage> {
    if reference.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: reference.len(),
        });
    }
    let kernel = DSigmaKernel::new(sigma)?;
    let p: Vec<f64> = sys.overlaps_with(reference).iter().map(|c| c * c).collect();
    let diagonal: f64 = p.iter().map(|x| x * x).sum();
    let mut off = 0.0;
    for a in 0..p.len() {
        for b in a + 1..p.len() {
            let w = p[a] * p[b];
            if w == 0.0 {
                continue;
            }
            off += w * kernel.eval(sys.quasienergies[a] - sys.quasienergies[b]);
        }
    }
    let fbar = diagonal + 2.0 * off;
    Ok(SpectralAverage {
        sigma,
        diagonal,
        off_diagonal: 2.0 * off,
        fbar,
        rate: rate_function(fbar, sys.n_sites),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(values: Vec<f64>) -> FidelityTrace {
        FidelityTrace::new(
            0.5,
            values,
            Provenance {
                n_sites: 8,
                label: "test".into(),
            },
        )
        .unwrap()
    }

    #[test]
    fn constant_trace_averages_to_one() {
        for sigma in [3.0, 100.0, 1e3] {
            let t = trace(vec![1.0; required_n_max(sigma) + 1]);
            let a = time_averaged_fidelity(&t, sigma).unwrap();
            // Only the Gaussian tail beyond 5 sigma is missing, ~e^{-25}.
            assert!(a.fbar <= 1.0 && 1.0 - a.fbar < 1e-10);
            assert!(a.rate >= 0.0 && a.rate < 1e-10);
        }
    }

    #[test]
    fn short_trace_rejected() {
        let t = trace(vec![1.0; 100]);
        assert!(matches!(
            time_averaged_fidelity(&t, 100.0),
            Err(Error::TraceTooShort { .. })
        ));
    }

    #[test]
    fn invalid_traces_rejected() {
        let p = Provenance {
            n_sites: 4,
            label: String::new(),
        };
        assert!(FidelityTrace::new(0.1, vec![0.9, 0.5], p.clone()).is_err());
        assert!(FidelityTrace::new(0.1, vec![1.0, 1.1], p.clone()).is_err());
        assert!(FidelityTrace::new(0.1, vec![1.0, -0.1], p).is_err());
    }

    #[test]
    fn normalization_matches_poisson_form() {
        // sum_{n>=0} w_n = (1 + sigma sqrt(pi) sum_m exp(-(pi sigma m)^2)) / 2
        for sigma in [0.7, 2.0, 40.0] {
            let pi = std::f64::consts::PI;
            let theta: f64 = (-3i32..=3).map(|m| (-(pi * sigma * m as f64).powi(2)).exp()).sum();
            let want = 0.5 * (1.0 + sigma * pi.sqrt() * theta);
            let got = gaussian_normalization(sigma);
            assert!((got - want).abs() < 1e-12 * want, "{sigma}: {got} vs {want}");
        }
    }

    #[test]
    fn kernel_at_zero_and_period() {
        let k = DSigmaKernel::new(15.0).unwrap();
        assert_eq!(k.eval(0.0), 1.0);
        assert_eq!(k.eval(2.0 * std::f64::consts::TAU), 1.0);
        assert!((k.eval(1.0) - k.eval(1.0 + std::f64::consts::TAU)).abs() < 1e-12);
    }
}
