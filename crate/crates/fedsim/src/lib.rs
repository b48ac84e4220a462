//! fedsim: deterministic single-process federated learning for tabular
//! anomaly detection.

pub mod error;
pub mod matrix;
pub mod nn;
pub mod data;
pub mod metrics;
pub mod seeds;

pub use error::{Error, Result};
