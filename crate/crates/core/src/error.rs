use thiserror::Error;

/// Errors surfaced by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("malformed region: {0}")]
    MalformedRegion(String),
    #[error("domain not contained in region: {0}")]
    OutsideRegion(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("value out of backend range: {0}")]
    OutOfRange(String),
    #[error("no fixed point found: {0}")]
    NoFixedPoint(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("empty input: {0}")]
    Empty(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

