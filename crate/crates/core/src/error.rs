use thiserror::Error;

/// Errors produced by the geometry, curve, and estimator modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {got}: {reason}")]
    InvalidDimension { got: usize, reason: &'static str },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector has a non-finite component")]
    NonFinite,

    #[error("cannot normalize a zero-length vector")]
    ZeroVector,

    #[error("invalid curve specification: {0}")]
    CurveSpec(String),

    #[error("quadrature did not converge: best estimate {best}, error estimate {error_estimate}")]
    Quadrature { best: f64, error_estimate: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The configuration sits on a measure-zero degenerate set (tangential
    /// plane, disc boundary through the curve). Estimators resample on this.
    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("estimator configuration error: {0}")]
    Configuration(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
