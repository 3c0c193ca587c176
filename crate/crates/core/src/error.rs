use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// `nearest_int` was asked to round a value of the form n + 1/2.
    #[error("nearest integer of {0} is ambiguous (half-integer)")]
    HalfInteger(String),

    /// The request is well-formed but would exceed a configured size limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("malformed residue cache {path}: {reason}")]
    Cache { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}
