use thiserror::Error;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Inputs violate a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// A numerical procedure did not reach its target.
    ///
    /// `estimate` carries the best value available when the procedure gave
    /// up (natural log of the magnitude for log-domain results) and
    /// `error_estimate` the achieved relative error, when known.
    #[error("numerical failure: {message}")]
    Numerical {
        message: String,
        estimate: Option<f64>,
        error_estimate: Option<f64>,
    },
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical {
            message: msg.into(),
            estimate: None,
            error_estimate: None,
        }
    }

    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
