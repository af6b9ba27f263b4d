use num_complex::Complex64;
use thiserror::Error;

/// Crate-wide error type. Variants mirror the failure modes of the public
/// operations: domain violations, singular evaluation points, series
/// truncation overruns and extrapolation breakdowns.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("polygon order must be at least 2, got {0}")]
    InvalidOrder(i64),

    #[error("vortex index {index} out of range for configuration of size {size}")]
    InvalidIndex { index: usize, size: usize },

    #[error("evaluation point {0} coincides with a singularity")]
    Pole(Complex64),

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("jump point: the closed form is two-valued at rho = 1 (left/right limits differ by 2*pi*N)")]
    JumpPoint,

    #[error("pole of order {0} not supported (orders 1 and 2 only)")]
    UnsupportedPoleOrder(u8),

    #[error("pole at {pole} lies within {distance:.3e} of the unit circle; residue evaluation ill-conditioned")]
    IllConditioned { pole: Complex64, distance: f64 },

    #[error("series truncation failed: {terms} terms reached at rho = {rho} without meeting the tail bound")]
    TruncationFailure { rho: f64, terms: usize },

    #[error("extrapolation did not converge; (epsilon, value) table: {table:?}")]
    NonConvergence { table: Vec<(f64, f64)> },

    #[error("invalid quadrature specification: {0}")]
    InvalidSpec(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("report serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
