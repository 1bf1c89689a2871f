use thiserror::Error;

/// Error cases surfaced by library operations.
///
/// The split mirrors how callers have to react: `Domain` and `Range` mean
/// the request itself was malformed, `Resource` means the request was valid
/// but exceeds a configured guard (memory or depth caps), and `State` means
/// a precondition on earlier computation does not hold.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("state error: {0}")]
    State(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub(crate) fn state(msg: impl Into<String>) -> Self {
        Error::State(msg.into())
    }
}
