use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-facing precondition was violated (dimension mismatch,
    /// non-unit direction vector, invalid parameter range, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A numeric failure: overflow, NaN, or an iteration that did not
    /// converge. Carries enough context to locate the failure.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// An internal consistency check failed; indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed spec: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

