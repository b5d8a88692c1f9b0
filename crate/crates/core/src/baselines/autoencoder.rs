use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::data::FeatureDataset;
use crate::error::{Error, Result};
use crate::mixup::{make_mixed_batch, MixupConfig};
use crate::nn::{mse_loss, Activation, AdamState, Matrix, Mlp};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineAeConfig {
    /// Encoder hidden widths; the decoder mirrors them.
    pub hidden: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
}

impl Default for BaselineAeConfig {
    fn default() -> Self {
        Self {
            hidden: vec![512, 128],
            epochs: 100,
            batch_size: 64,
            learning_rate: 1e-3,
        }
    }
}

impl BaselineAeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return Err(Error::Config("baseline_ae.hidden must list positive widths".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("baseline_ae.batch_size must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("baseline_ae.learning_rate must be positive".into()));
        }
        Ok(())
    }
}

/// Plain ReLU autoencoder `D → hidden… → k → reversed hidden… → D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineAeModel {
    pub encoder: Mlp,
    pub decoder: Mlp,
}

impl BaselineAeModel {
    pub fn new<R: rand::Rng + ?Sized>(dim: usize, k: usize, hidden: &[usize], rng: &mut R) -> Result<Self> {
        let mut dims = vec![dim];
        dims.extend(hidden);
        dims.push(k);
        let encoder = Mlp::with_dims(&dims, Activation::Relu, Activation::Linear, 0.0, vec![], rng)?;
        dims.reverse();
        let decoder = Mlp::with_dims(&dims, Activation::Relu, Activation::Linear, 0.0, vec![], rng)?;
        Ok(Self { encoder, decoder })
    }

    pub fn k(&self) -> usize {
        self.encoder.out_dim()
    }

    pub fn encode(&self, x: &Matrix) -> Result<Matrix> {
        self.encoder.predict(x)
    }

    pub fn reconstruct(&self, x: &Matrix) -> Result<Matrix> {
        self.decoder.predict(&self.encoder.predict(x)?)
    }

    pub fn reconstruction_error(&self, x: &Matrix) -> Result<f64> {
        Ok(super::pca::squared_error(x, &self.reconstruct(x)?) / x.rows().max(1) as f64)
    }
}

/// MSE training on batches drawn by [`make_mixed_batch`]; pass
/// [`MixupConfig::disabled`] to train on unmixed rows only.
pub fn baseline_ae_train(
    data: &FeatureDataset,
    k: usize,
    config: &BaselineAeConfig,
    mixup: &MixupConfig,
    rng: &mut dyn RngCore,
) -> Result<BaselineAeModel> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if k == 0 || k >= data.dim() {
        return Err(Error::InvalidArgument(format!("baseline autoencoder k={k} must lie in 1..{}", data.dim())));
    }
    let mut model = BaselineAeModel::new(data.dim(), k, &config.hidden, rng)?;
    let mut enc_opt = AdamState::for_mlp(config.learning_rate, &model.encoder);
    let mut dec_opt = AdamState::for_mlp(config.learning_rate, &model.decoder);
    let batches = data.len().div_ceil(config.batch_size);
    for epoch in 1..=config.epochs {
        for batch in 0..batches {
            let x = make_mixed_batch(data, config.batch_size, mixup, rng)?.x_tilde;
            let enc = model.encoder.forward(&x, None)?;
            let dec = model.decoder.forward(enc.output(), None)?;
            let (loss, grad) = mse_loss(dec.output(), &x)?;
            if !loss.is_finite() {
                return Err(Error::NonFinite {
                    stage: "baseline_autoencoder",
                    epoch,
                    batch,
                    loss,
                });
            }
            let (dec_g, dz) = model.decoder.backward_with_input(&dec, &grad)?;
            let enc_g = model.encoder.backward(&enc, &dz)?;
            dec_opt.step_mlp(&mut model.decoder, &dec_g)?;
            enc_opt.step_mlp(&mut model.encoder, &enc_g)?;
        }
    }
    Ok(model)
}

pub fn baseline_ae_encode(model: &BaselineAeModel, data: &FeatureDataset) -> Result<FeatureDataset> {
    data.with_features(model.encode(data.features())?)
}
