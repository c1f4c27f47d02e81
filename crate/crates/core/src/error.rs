use thiserror::Error;

/// Errors produced by instance loading, validation, and the solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The input bytes are not a well-formed instance or distribution file.
    #[error("parse error: {0}")]
    Parse(String),

    /// The input is well-formed but violates a model invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A design or state index is out of range.
    #[error("index error: {0}")]
    Index(String),

    /// A solver did not converge or hit an iteration limit.
    #[error("solver failure: {0}")]
    Solver(String),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn index(msg: impl Into<String>) -> Self {
        Error::Index(msg.into())
    }

    pub fn solver(msg: impl Into<String>) -> Self {
        Error::Solver(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
