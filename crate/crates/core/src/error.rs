use thiserror::Error;

/// Errors produced by the core algorithms.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("hypothesis window violated: {0}")]
    Hypothesis(String),

    #[error("matrix is singular")]
    Singular,

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("element does not square to the identity")]
    NotAnInvolution,

    #[error("exponent multiple is for dimension {em_n} over GF({em_q}) but element is {n}x{n} over GF({q})")]
    ExponentMismatch {
        em_n: usize,
        em_q: u64,
        n: usize,
        q: u64,
    },

    #[error("group closure exceeded cap of {0} elements")]
    CapExceeded(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
