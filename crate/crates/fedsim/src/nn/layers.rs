//! Layer specifications for the feedforward stack.

use crate::error::{Error, Result};

pub const DEFAULT_BN_EPSILON: f64 = 1e-5;
pub const DEFAULT_DROPOUT_RATE: f64 = 0.3;
pub const HIDDEN_WIDTH: usize = 64;

/// One layer of the network. Dimensions are validated as a stack, not per layer.
#[derive(Debug, Clone, PartialEq)]
pub enum LayerSpec {
    Dense { in_dim: usize, out_dim: usize },
    BatchNorm { dim: usize, epsilon: f64 },
    Relu { dim: usize },
    Dropout { dim: usize, rate: f64 },
    Sigmoid { dim: usize },
}

impl LayerSpec {
    pub fn in_dim(&self) -> usize {
        match *self {
            LayerSpec::Dense { in_dim, .. } => in_dim,
            LayerSpec::BatchNorm { dim, .. }
            | LayerSpec::Relu { dim }
            | LayerSpec::Dropout { dim, .. }
            | LayerSpec::Sigmoid { dim } => dim,
        }
    }

    pub fn out_dim(&self) -> usize {
        match *self {
            LayerSpec::Dense { out_dim, .. } => out_dim,
            _ => self.in_dim(),
        }
    }
}

/// The binary-classifier stack used throughout: two 64-unit hidden blocks
/// (dense, batchnorm, relu, dropout 0.3) and a sigmoid output unit.
pub fn default_stack(input_dim: usize) -> Vec<LayerSpec> {
    vec![
        LayerSpec::Dense { in_dim: input_dim, out_dim: HIDDEN_WIDTH },
        LayerSpec::BatchNorm { dim: HIDDEN_WIDTH, epsilon: DEFAULT_BN_EPSILON },
        LayerSpec::Relu { dim: HIDDEN_WIDTH },
        LayerSpec::Dropout { dim: HIDDEN_WIDTH, rate: DEFAULT_DROPOUT_RATE },
        LayerSpec::Dense { in_dim: HIDDEN_WIDTH, out_dim: HIDDEN_WIDTH },
        LayerSpec::BatchNorm { dim: HIDDEN_WIDTH, epsilon: DEFAULT_BN_EPSILON },
        LayerSpec::Relu { dim: HIDDEN_WIDTH },
        LayerSpec::Dropout { dim: HIDDEN_WIDTH, rate: DEFAULT_DROPOUT_RATE },
        LayerSpec::Dense { in_dim: HIDDEN_WIDTH, out_dim: 1 },
        LayerSpec::Sigmoid { dim: 1 },
    ]
}

/// Check stack consistency: non-empty, adjacent dimensions chained, parameters
/// in range, and a single sigmoid unit at the output so predictions are
/// probabilities.
pub fn validate_stack(stack: &[LayerSpec]) -> Result<()> {
    if stack.is_empty() {
        return Err(Error::Config("layer stack is empty".into()));
    }
    for (i, layer) in stack.iter().enumerate() {
        match *layer {
            LayerSpec::Dense { in_dim, out_dim } => {
                if in_dim == 0 || out_dim == 0 {
                    return Err(Error::Config(format!("layer {i}: dense dims must be > 0")));
                }
            }
            LayerSpec::BatchNorm { dim, epsilon } => {
                if dim == 0 {
                    return Err(Error::Config(format!("layer {i}: batchnorm dim must be > 0")));
                }
                if epsilon <= 0.0 {
                    return Err(Error::Config(format!("layer {i}: batchnorm epsilon must be > 0")));
                }
            }
            LayerSpec::Dropout { dim, rate } => {
                if dim == 0 {
                    return Err(Error::Config(format!("layer {i}: dropout dim must be > 0")));
                }
                if !(0.0..1.0).contains(&rate) {
                    return Err(Error::Config(format!("layer {i}: dropout rate must be in [0, 1)")));
                }
            }
            LayerSpec::Relu { dim } | LayerSpec::Sigmoid { dim } => {
                if dim == 0 {
                    return Err(Error::Config(format!("layer {i}: dim must be > 0")));
                }
            }
        }
        if i + 1 < stack.len() && layer.out_dim() != stack[i + 1].in_dim() {
            return Err(Error::Config(format!(
                "layer {i} out_dim {} does not match layer {} in_dim {}",
                layer.out_dim(),
                i + 1,
                stack[i + 1].in_dim()
            )));
        }
    }
    match stack.last() {
        Some(LayerSpec::Sigmoid { dim: 1 }) => Ok(()),
        _ => Err(Error::Config(
            "stack must end with a single sigmoid output unit".into(),
        )),
    }
}
