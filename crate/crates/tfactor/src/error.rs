use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An input exceeds a hard size cap of an exact routine.
    #[error("capacity exceeded: {what} is {got}, limit {limit}")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    /// A randomized procedure exhausted its retries.
    #[error("{stage} failed after {attempts} attempts: {reason}")]
    Failure {
        stage: &'static str,
        attempts: usize,
        reason: String,
    },

    /// An output failed its own validation. Always a bug.
    #[error("integrity violation: {0}")]
    Integrity(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn capacity(what: &'static str, got: usize, limit: usize) -> Self {
        Error::Capacity { what, got, limit }
    }

    pub fn integrity(msg: impl Into<String>) -> Self {
        Error::Integrity(msg.into())
    }

    /// True for errors a caller should report as a bad request rather than a bug.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Parameter(_) | Error::Capacity { .. } | Error::Parse { .. }
        )
    }
}
