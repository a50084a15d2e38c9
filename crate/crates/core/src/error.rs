use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("argument {value} outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("coefficient at ({0}, {1}) lies outside the frame")]
    SupportViolation(i64, i64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u8, u8),
    #[error("hypothesis fails at p = {p}: {lhs} > {rhs}")]
    HypothesisFailed { p: f64, lhs: f64, rhs: f64 },
    #[error("root solver did not bracket a sign change: {0}")]
    NoBracket(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
