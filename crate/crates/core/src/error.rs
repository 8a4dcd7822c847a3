use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported algebra `{0}` (expected A1, A2, B2 or G2)")]
    UnsupportedAlgebra(String),
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole: {0}")]
    Pole(String),
    #[error("module mismatch: {0}")]
    ModuleMismatch(String),
    #[error("level error: {0}")]
    Level(String),
    #[error("truncation: {0}")]
    Truncation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
