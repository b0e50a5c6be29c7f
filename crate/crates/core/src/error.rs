use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("singular form")]
    Singular,
    #[error("division by zero")]
    DivisionByZero,
    #[error("mismatched operands: {0}")]
    Mismatch(String),
    #[error("unsupported splitting field: {0}")]
    UnsupportedSplittingField(String),
    #[error("not a cocycle: {0}")]
    NotACocycle(String),
    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("descent failed: {0}")]
    Descent(String),
}
