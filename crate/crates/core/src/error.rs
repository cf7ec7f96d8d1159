use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid degree sequence: {0}")]
    InvalidSequence(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("invalid target function: {0}")]
    InvalidTarget(String),
    #[error("level mismatch: expected depth {expected}, found {found}")]
    LevelMismatch { expected: usize, found: usize },
    #[error("horizon exceeded: requested {requested}, available {available}")]
    HorizonExceeded { requested: usize, available: usize },
    #[error("double precision underflow at step {0}; rerun in exact mode")]
    Underflow(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
