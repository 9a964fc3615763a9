use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An exhaustive enumerator would exceed its configured guard.
    #[error("resource limit exceeded: {what} needs {needed}, guard is {limit}")]
    ResourceLimit {
        what: String,
        needed: String,
        limit: String,
    },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// A removal certificate was built but its indicator product does not vanish.
    #[error("certificate failure: {0}")]
    CertificateFailure(String),

    #[error("iteration limit of {limit} reached: {detail}")]
    IterationLimit { limit: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn resource(what: impl Into<String>, needed: impl ToString, limit: impl ToString) -> Self {
        Error::ResourceLimit {
            what: what.into(),
            needed: needed.to_string(),
            limit: limit.to_string(),
        }
    }
}
