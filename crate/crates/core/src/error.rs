use thiserror::Error;

/// Errors raised by the entanglement kernels and the command line front end.
#[derive(Debug, Error)]
pub enum EntError {
    /// A dimension or register size exceeds the configured cap.
    #[error("size limit exceeded: {0}")]
    Size(String),

    /// An argument is outside the documented domain of an operation.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An input violates an operation's contract (e.g. a non-Hermitian matrix).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A state-spec string could not be parsed.
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, EntError>;

pub(crate) fn argument<T>(msg: impl Into<String>) -> Result<T> {
    Err(EntError::Argument(msg.into()))
}

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(EntError::Contract(msg.into()))
}
