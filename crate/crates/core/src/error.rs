use thiserror::Error;

/// Errors raised by the simulator and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("operator length mismatch: {left} sites vs {right} sites")]
    LengthMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("L={n_sites} exceeds the limit L<={max} for {what}")]
    SizeGuard {
        what: &'static str,
        n_sites: usize,
        max: usize,
    },

    #[error("unsupported truncation order k={0} (supported: 0, 1)")]
    UnsupportedOrder(usize),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("dense eigendecomposition failed")]
    Eigendecomposition,

    #[error("operator is not real-symmetric: {0}")]
    NotRealSymmetric(String),

    #[error("operator is not diagonal in the computational basis")]
    NotDiagonal,

    #[error("sector block is not unitary (deviation {0:.3e})")]
    NonUnitary(f64),

    #[error("trace has n_max={n_max} but sigma={sigma} requires at least {required}")]
    TraceTooShort { n_max: usize, required: usize, sigma: f64 },

    #[error("resonant denominators for pairs {0:?}")]
    Resonant(Vec<(usize, usize)>),

    #[error("integrator step-size failure at t={t}: {reason}")]
    StepSize { t: f64, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
