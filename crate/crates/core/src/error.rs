use thiserror::Error;

pub type Result<T> = std::result::Result<T, SsaError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SsaError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// The MSE predictor has no non-vanishing spectral weight.
    #[error("target is not identifiable: {0}")]
    Identifiability(String),

    #[error("value {value} outside domain: {reason}")]
    Domain { value: f64, reason: String },

    #[error("constraint infeasible: {0}")]
    Infeasible(String),

    /// Corner case where a required spectral weight vanishes.
    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid process model: {0}")]
    Model(String),

    #[error("target span too small: {0}")]
    SpanTooSmall(String),

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("holding time undefined: {crossings} sign change(s) observed")]
    UndefinedHoldingTime { crossings: usize },
}

impl SsaError {
    /// Stable machine-readable category, used by the CLI for error reporting.
    pub fn code(&self) -> &'static str {
        match self {
            SsaError::InvalidDimension(_) | SsaError::DimensionMismatch { .. } => "invalid-dimension",
            SsaError::Identifiability(_) => "identifiability",
            SsaError::Domain { .. } => "domain",
            SsaError::Infeasible(_) => "constraint-infeasible",
            SsaError::NoSolution(_) => "no-solution",
            SsaError::Singular(_) => "singular",
            SsaError::Numerical(_) => "numerical",
            SsaError::Model(_) => "model",
            SsaError::SpanTooSmall(_) => "span-too-small",
            SsaError::InsufficientData { .. } => "insufficient-data",
            SsaError::UndefinedHoldingTime { .. } => "undefined-holding-time",
        }
    }

    pub(crate) fn domain(value: f64, reason: impl Into<String>) -> Self {
        SsaError::Domain {
            value,
            reason: reason.into(),
        }
    }
}
