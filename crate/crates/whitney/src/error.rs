use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Unknown ids, malformed arguments, inconsistent inputs.
    #[error("input error: {0}")]
    Input(String),
    /// A file failed to parse; `path` locates the offending value.
    #[error("parse error at {path}: {msg}")]
    Parse { path: String, msg: String },
    /// An operation was called outside its documented domain.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A Whitney operation failed validation; one entry per violated clause.
    #[error("invalid operation: {}", .0.join("; "))]
    Invalid(Vec<String>),
    /// A step of an operation sequence failed.
    #[error("step {index} failed: {source}")]
    Step {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    /// A structural guarantee did not hold on a supposedly valid input.
    #[error("theorem violation: {0}")]
    Theorem(String),
    /// An internal consistency check failed.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn theorem(msg: impl Into<String>) -> Self {
        Error::Theorem(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// True for errors caused by the caller's input rather than by the toolkit.
    pub fn is_input(&self) -> bool {
        match self {
            Error::Input(_) | Error::Parse { .. } | Error::Precondition(_) | Error::Invalid(_) => {
                true
            }
            Error::Step { source, .. } => source.is_input(),
            Error::Theorem(_) | Error::Internal(_) => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
