//! Dimensionality-reduction baselines: PCA and a plain autoencoder.

mod autoencoder;
mod pca;

pub use autoencoder::{baseline_ae_encode, baseline_ae_train, BaselineAeConfig, BaselineAeModel};
pub use pca::{covariance, pca_fit, PcaModel};
