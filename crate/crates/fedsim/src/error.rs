//! Crate-wide error type.

use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration: bad layer stack, bad hyperparameter, empty data.
    #[error("configuration error: {0}")]
    Config(String),

    /// Tensor/vector dimensions do not line up.
    #[error("shape error: {0}")]
    Shape(String),

    /// A train-mode batch too small for batch statistics.
    #[error("degenerate batch: {0}")]
    DegenerateBatch(String),

    /// Ingestion or dataset-content problem (bad CSV, unmapped label, unseen category).
    #[error("data error: {0}")]
    Data(String),

    /// A client partition cannot satisfy its targets.
    #[error("infeasible partition: {0}")]
    Partition(String),

    /// Numerical routine failed (e.g. correlation matrix not factorable).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Internal consistency violation (stale cache, mismatched buffers).
    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 config, 3 data, 4 runtime.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Shape(_) => 2,
            Error::Data(_) | Error::Partition(_) => 3,
            _ => 4,
        }
    }
}
