use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty demand")]
    EmptyDemand,

    #[error("invalid request ({src}, {dst}) for n = {n}: {reason}")]
    InvalidRequest {
        src: usize,
        dst: usize,
        n: usize,
        reason: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid stochastic matrix: {0}")]
    InvalidDistribution(String),

    #[error("key {0} is not present in the tree")]
    KeyAbsent(usize),

    #[error("nodes {src} and {dst} are disconnected")]
    Disconnected { src: usize, dst: usize },

    #[error("constraint breach: {0}")]
    ConstraintBreach(String),

    #[error("instance exceeds oracle limit: {0}")]
    LimitExceeded(String),

    #[error("incompatible pairing: {0}")]
    Incompatible(String),

    #[error("zero denominator in ratio")]
    ZeroDenominator,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
