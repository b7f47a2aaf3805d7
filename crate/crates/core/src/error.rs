use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("size mismatch: expected {expected} qubits, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("operators do not commute")]
    AntiCommuting,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("rate {rate} cannot be realised on {n} qubits")]
    IncompatibleRate { n: usize, rate: f64 },
    #[error("operation requires a CSS code")]
    NotCss,
}
