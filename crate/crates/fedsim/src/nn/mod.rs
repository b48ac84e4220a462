//! From-scratch feedforward network with manual backpropagation, Adam and
//! binary cross-entropy. Parameters are exposed as a flat [`ParamVector`] so
//! the federation layer can treat models as pure numeric state.

mod adam;
mod layers;
mod loss;
mod model;
mod train;

pub mod params;

pub use adam::{AdamState, DEFAULT_BETA1, DEFAULT_BETA2, DEFAULT_EPS, DEFAULT_LR};
pub use layers::{default_stack, validate_stack, LayerSpec, DEFAULT_DROPOUT_RATE, HIDDEN_WIDTH};
pub use loss::{bce_grad, bce_loss, BCE_CLAMP};
pub use model::{Batch, ForwardCache, MlpModel, Mode, BN_MOMENTUM};
pub use params::{Layout, ParamRole, ParamVector};
pub use train::batch_boundaries;
