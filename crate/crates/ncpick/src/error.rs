use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("structure violated: {0}")]
    Structure(String),
    #[error("infeasible: {reason}")]
    Infeasible {
        reason: String,
        lambda_min: Option<f64>,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("divergent: {0}")]
    Divergence(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
}

impl Error {
    pub fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible {
            reason: msg.into(),
            lambda_min: None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Infeasible { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
