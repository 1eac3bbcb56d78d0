use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain (zero where a positive
    /// integer is required, empty input, length mismatch, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A bit stream could not be decoded.
    #[error("decode error: {0}")]
    Decode(String),
    /// A process model or ensemble violates its invariants.
    #[error("invalid model: {0}")]
    Model(String),
    /// Exhaustive work was requested beyond the configured bound.
    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),
    /// Malformed textual input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn decode(msg: impl Into<String>) -> Error {
    Error::Decode(msg.into())
}
