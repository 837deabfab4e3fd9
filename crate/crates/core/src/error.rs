use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid query: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid query: coordinate {index} = {value} lies outside [0, 1]")]
    OutOfDomain { index: usize, value: f64 },

    #[error("non-finite observation {0}")]
    NonFinite(f64),

    #[error("control set index {index} out of range (family has {count} sets)")]
    UnknownSet { index: usize, count: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("factorization broke down: pivot {pivot} at row {row}")]
    Factorization { row: usize, pivot: f64 },

    #[error("{source_name}, line {line}: {message}")]
    Ingest {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl fmt::Display) -> Self {
        Error::Config(msg.to_string())
    }
}
