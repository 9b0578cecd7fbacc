use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(u32, u32),
    #[error("p-adic prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("{0} is divisible by p = {1}")]
    DivisibleByP(i64, u64),
    #[error("coefficient ring mismatch: {0}")]
    RingMismatch(String),
    #[error("parity mismatch: chi(-1) = {chi_sign} but weight {weight} has sign {weight_sign}")]
    ParityMismatch {
        weight: i64,
        chi_sign: i32,
        weight_sign: i32,
    },
    #[error("invalid weight {0}: {1}")]
    InvalidWeight(i64, &'static str),
    #[error("truncation: {0}")]
    Truncation(String),
    #[error("support mismatch: {0}")]
    SupportMismatch(String),
    #[error("morphism failed at index {index}: {source}")]
    Morphism {
        index: String,
        #[source]
        source: Box<Error>,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("character mismatch: {0}")]
    CharacterMismatch(String),
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
