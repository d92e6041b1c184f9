use thiserror::Error;

/// Separating certificate for an empty intersection of the flow polytope
/// with an affine constraint set: a nonnegative row combination `u` such
/// that `u'Ay > u'b` for every feasible `y`.
#[derive(Debug, Clone)]
pub struct InfeasibilityCertificate {
    /// Nonnegative weights over the constraint rows.
    pub row_weights: Vec<f64>,
    /// Minimal achievable `u'(Ay - b)` over the flow polytope (positive).
    pub separation: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unsupported capability: {0}")]
    Capability(String),

    #[error("infeasible constraint intersection (separation {})", .0.separation)]
    Infeasible(InfeasibilityCertificate),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }
}
