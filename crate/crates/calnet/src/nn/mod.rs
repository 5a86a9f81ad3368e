//! Minimal dense network core: MLPs with analytic backprop, a diagonal
//! Gaussian policy head, Adam, and the named-tensor codec used by
//! checkpoints.
//!
//! Parameter sets are plain data. Once a snapshot is handed to rollout
//! workers it is treated as immutable; forward passes take `&self` and are
//! safe to run concurrently. Updates happen in a single writer context that
//! publishes a fresh snapshot afterwards.

pub mod adam;
pub mod gaussian;
pub mod mlp;
pub mod tensor;

pub use adam::{AdamConfig, AdamState};
pub use gaussian::{
    kl_diag_gaussian, kl_diag_gaussian_grads, log_prob_given_mean, log_prob_grads,
    GaussianPolicyParams, LN_2PI,
};
pub use mlp::{Activation, Layer, MlpParams};
pub use tensor::{read_tensor, write_tensor, NamedTensor};
