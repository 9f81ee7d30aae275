use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty range: limit {0} is below 2")]
    EmptyRange(u64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    #[error("polynomial is not squarefree modulo {0}")]
    NotSquarefree(u64),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(usize, usize),

    #[error("denominator constant term {0} is not a unit")]
    NonUnitConstant(String),

    #[error("quadratic form is not positive definite")]
    NotPositiveDefinite,

    #[error("coefficient at index {index} is not divisible by {divisor}")]
    Indivisible { index: usize, divisor: u32 },

    #[error("leading coefficient c_1 = {0}, expected 1")]
    NotNormalized(String),

    #[error("precision: {0}")]
    Precision(String),

    #[error("configuration: {0}")]
    Config(String),
}
