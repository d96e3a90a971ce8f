use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// `C^H C` is not invertible, so the constraint set has no projector.
    #[error("constraint matrix is rank deficient (Gram matrix not positive definite)")]
    SingularConstraint,

    #[error("matrix is numerically singular: {0}")]
    Conditioning(String),

    /// The running estimate of `R^-1 C` grew past the divergence guard.
    #[error("step size too large: estimate norm {norm:.3e} exceeds {limit:.1e}")]
    StepSize { norm: f64, limit: f64 },

    #[error("degenerate step: {0}")]
    DegenerateStep(String),

    #[error("invalid scenario field `{field}`: {reason}")]
    Scenario { field: String, reason: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn scenario(field: &str, reason: impl Into<String>) -> Self {
        Error::Scenario {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}
