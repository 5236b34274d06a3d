use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Structurally bad input: malformed graph, bag list, tree, scheme, ...
    #[error("invalid input: {0}")]
    Invalid(String),
    /// Input is well formed but violates a precondition of the operation.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A certification step failed (stretch bound, scheme condition, ...).
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
