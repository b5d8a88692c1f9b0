//! Minimal dense neural-network engine: layers, losses, Adam and a
//! finite-difference gradient oracle.

mod activation;
mod adam;
mod gradcheck;
mod init;
mod loss;
mod matrix;
mod mlp;

pub use activation::{sigmoid, softmax_rows, Activation, DEFAULT_LEAKY_SLOPE};
pub use adam::AdamState;
pub use gradcheck::{finite_diff_gradient, relative_error};
pub use init::{he_bound, init_weights};
pub use loss::{bce_loss, mse_loss, softmax_ce_loss, softmax_ce_soft_loss, BCE_EPS};
pub use matrix::Matrix;
pub use mlp::{DenseLayer, ForwardCache, Gradients, LayerGrad, Mlp};
