//! Mixup-augmented adversarial autoencoder for emotion feature vectors.
//!
//! An encoder compresses feature vectors to a small latent code, a generator
//! maps codes back to feature space, and a discriminator separates real rows
//! from reconstructions. Training batches are built by mixup. The crate also
//! ships PCA and plain-autoencoder baselines, a downstream classifier with
//! UAR scoring, the experiment drivers, and a Gaussian benchmark that stands
//! in for licensed corpora.
//!
//! ```
//! use mixgan::data::{make_benchmark, BenchmarkConfig};
//! use mixgan::model::{MixGanConfig, MixGanModel};
//! use mixgan::training::{train, TrainConfig};
//! use rand::SeedableRng;
//!
//! let data = make_benchmark(&BenchmarkConfig { n_per_class: 10, dim: 8, ..Default::default() })?;
//! let cfg = MixGanConfig { input_dim: 8, encoder_hidden: vec![16, 8], discriminator_hidden: vec![16, 16], ..Default::default() };
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
//! let mut model = MixGanModel::new(cfg, &mut rng)?;
//! let run = train(&mut model, &data, &TrainConfig { pretrain_epochs: 2, epochs: 2, ..Default::default() }, &mut rng)?;
//! assert_eq!(run.log.len(), 4);
//! # Ok::<(), mixgan::Error>(())
//! ```

pub mod baselines;
pub mod checkpoint;
pub mod commands;
pub mod config;
pub mod data;
pub mod error;
pub mod eval;
pub mod mixup;
pub mod model;
pub mod nn;
pub mod training;

pub use checkpoint::{load_checkpoint, save_checkpoint, ModelCheckpoint};
pub use config::RunConfig;
pub use data::{Emotion, FeatureDataset};
pub use error::{Error, Result};
pub use eval::{ExperimentConfig, ExperimentReport};
pub use mixup::{make_mixed_batch, mix_pair, MixedBatch, MixupConfig};
pub use model::{MixGanConfig, MixGanModel};
pub use training::{train, TrainConfig};
