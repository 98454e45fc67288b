use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid key length: expected {expected} bytes, got {actual}")]
    InvalidKeyLength { expected: usize, actual: usize },

    #[error("requested output of {0} bits is out of range")]
    InvalidOutputLength(usize),

    #[error("counter index must be at least 1, got {0}")]
    InvalidCounter(u32),

    #[error("bit stream length {actual} does not match {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("charset must hold at least 2 symbols, got {0}")]
    CharsetTooSmall(usize),

    #[error("charset symbol {0:?} appears more than once")]
    DuplicateSymbol(char),

    #[error("unknown charset preset {0} (expected 1, 2 or 3)")]
    UnknownCharset(u8),

    #[error("bits per character must lie in {min}..=64, got {actual}")]
    InvalidCharBits { min: u32, actual: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid hex: {0}")]
    Hex(#[from] hex::FromHexError),

    #[error("matrix file must be {expected} bytes, got {actual}")]
    MatrixSize { expected: usize, actual: usize },

    #[error("{path}:{line}: {reason}")]
    VectorFormat {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("no vector files found under {0}")]
    NoVectors(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
