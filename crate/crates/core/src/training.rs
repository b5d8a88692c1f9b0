//! Adversarial autoencoder training on mixup batches.
//!
//! Each step runs three phases in order:
//!
//! 1. encoder + generator minimise the reconstruction loss `‖x − G(E(x))‖²`
//!    over every row of the mixed batch;
//! 2. the generator alone minimises `−log D(G(E(x)))` over every row;
//! 3. the discriminator alone minimises binary cross-entropy with the
//!    batch's unmixed rows (λ ∈ {0, 1}) as positives and their
//!    reconstructions as negatives.
//!
//! Phase 3 is skipped, and counted, when a batch has no unmixed rows.

use std::io::Write;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::FeatureDataset;
use crate::error::{Error, Result};
use crate::mixup::{make_mixed_batch, MixedBatch, MixupConfig};
use crate::model::MixGanModel;
use crate::nn::{bce_loss, mse_loss, AdamState, Gradients, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub pretrain_epochs: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr_autoencoder: f64,
    pub lr_generator: f64,
    pub lr_discriminator: f64,
    /// Multiplier on the reconstruction loss in phase 1. The phases are
    /// separate Adam steps, so this barely matters at the default of 1.
    pub recon_weight: f64,
    pub mixup: MixupConfig,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            pretrain_epochs: 50,
            epochs: 200,
            batch_size: 64,
            lr_autoencoder: 1e-4,
            lr_generator: 1e-4,
            lr_discriminator: 1e-4,
            recon_weight: 1.0,
            mixup: MixupConfig::default(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("train.batch_size must be positive".into()));
        }
        for (name, v) in [
            ("lr_autoencoder", self.lr_autoencoder),
            ("lr_generator", self.lr_generator),
            ("lr_discriminator", self.lr_discriminator),
            ("recon_weight", self.recon_weight),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("train.{name} must be positive, got {v}")));
            }
        }
        self.mixup.validate()
    }
}

/// Adam state for each parameter group the schedule updates.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerStates {
    pub ae_encoder: AdamState,
    pub ae_generator: AdamState,
    pub generator: AdamState,
    pub discriminator: AdamState,
}

impl OptimizerStates {
    pub fn new(model: &MixGanModel, config: &TrainConfig) -> Self {
        Self {
            ae_encoder: AdamState::for_mlp(config.lr_autoencoder, &model.encoder),
            ae_generator: AdamState::for_mlp(config.lr_autoencoder, &model.generator),
            generator: AdamState::for_mlp(config.lr_generator, &model.generator),
            discriminator: AdamState::for_mlp(config.lr_discriminator, &model.discriminator),
        }
    }

    pub fn in_order(&self) -> [&AdamState; 4] {
        [&self.ae_encoder, &self.ae_generator, &self.generator, &self.discriminator]
    }

    pub fn from_order([ae_encoder, ae_generator, generator, discriminator]: [AdamState; 4]) -> Self {
        Self {
            ae_encoder,
            ae_generator,
            generator,
            discriminator,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseLosses {
    pub reconstruction: f64,
    pub generator: f64,
    pub discriminator: Option<f64>,
    /// Discriminator accuracy on this batch's real/fake rows, before its update.
    pub discriminator_accuracy: Option<f64>,
    pub real_rows: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Pretrain,
    Adversarial,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Pretrain => "pretrain",
            Stage::Adversarial => "adversarial",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub stage: Stage,
    pub reconstruction: f64,
    pub generator: Option<f64>,
    pub discriminator: Option<f64>,
    pub discriminator_accuracy: Option<f64>,
    pub holdout_accuracy: Option<f64>,
    pub skipped_discriminator_updates: usize,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub records: Vec<EpochRecord>,
}

impl TrainLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last_reconstruction(&self) -> Option<f64> {
        self.records.last().map(|r| r.reconstruction)
    }

    /// One line per epoch. Wall time is left out so identical runs produce
    /// identical files; see [`write_timing_csv`](Self::write_timing_csv).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "epoch,stage,reconstruction,generator,discriminator,disc_accuracy,holdout_disc_accuracy,skipped_disc_updates"
        )?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.epoch,
                r.stage.name(),
                r.reconstruction,
                opt(r.generator),
                opt(r.discriminator),
                opt(r.discriminator_accuracy),
                opt(r.holdout_accuracy),
                r.skipped_discriminator_updates
            )?;
        }
        Ok(())
    }

    pub fn write_timing_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "epoch,wall_time_secs")?;
        for r in &self.records {
            writeln!(w, "{},{}", r.epoch, r.wall_time_secs)?;
        }
        Ok(())
    }
}

/// Output of a full training run.
#[derive(Debug, Clone)]
pub struct TrainRun {
    pub log: TrainLog,
    pub optimizers: OptimizerStates,
}

/// Phase 1 loss and gradients for encoder and generator.
pub fn autoencoder_gradients(
    model: &MixGanModel,
    x: &Matrix,
    recon_weight: f64,
    rng: &mut dyn RngCore,
) -> Result<(f64, Gradients, Gradients)> {
    let enc = model.encoder.forward(x, Some(&mut *rng))?;
    let gen = model.generator.forward(enc.output(), Some(&mut *rng))?;
    let (loss, mut grad) = mse_loss(gen.output(), x)?;
    grad.scale(recon_weight);
    let (gen_grads, dz) = model.generator.backward_with_input(&gen, &grad)?;
    let enc_grads = model.encoder.backward(&enc, &dz)?;
    Ok((recon_weight * loss, enc_grads, gen_grads))
}

/// Phase 2 loss `−mean log D(G(E(x)))` and the generator's gradient. The
/// encoder and discriminator run in eval mode and are not differentiated.
pub fn generator_gradients(
    model: &MixGanModel,
    x: &Matrix,
    rng: &mut dyn RngCore,
) -> Result<(f64, Gradients)> {
    let z = model.encode(x, None)?;
    let gen = model.generator.forward(&z, Some(rng))?;
    let disc = model.discriminator.forward(gen.output(), None)?;
    let prob = disc.output().as_slice();
    let (loss, dprob) = bce_loss(prob, &vec![1.0; prob.len()])?;
    let dprob = Matrix::from_vec(prob.len(), 1, dprob)?;
    let dfake = model.discriminator.input_gradient(&disc, &dprob)?;
    let grads = model.generator.backward(&gen, &dfake)?;
    Ok((loss, grads))
}

/// Phase 3 loss, gradient and pre-update accuracy with `real` rows as
/// positives and their reconstructions as negatives.
pub fn discriminator_gradients(model: &MixGanModel, real: &Matrix) -> Result<(f64, Gradients, f64)> {
    let fake = model.reconstruct(real)?;
    let input = real.vstack(&fake)?;
    let n = real.rows();
    let labels: Vec<f64> = (0..2 * n).map(|i| if i < n { 1.0 } else { 0.0 }).collect();
    let cache = model.discriminator.forward(&input, None)?;
    let prob = cache.output().as_slice();
    let accuracy = binary_accuracy(prob, &labels);
    let (loss, dprob) = bce_loss(prob, &labels)?;
    let dprob = Matrix::from_vec(2 * n, 1, dprob)?;
    let grads = model.discriminator.backward(&cache, &dprob)?;
    Ok((loss, grads, accuracy))
}

fn binary_accuracy(prob: &[f64], labels: &[f64]) -> f64 {
    let correct = prob
        .iter()
        .zip(labels)
        .filter(|(&p, &y)| (p > 0.5) == (y > 0.5))
        .count();
    correct as f64 / prob.len().max(1) as f64
}

fn finite(stage: &'static str, loss: f64) -> Result<f64> {
    if loss.is_finite() {
        Ok(loss)
    } else {
        Err(Error::NonFinite {
            stage,
            epoch: 0,
            batch: 0,
            loss,
        })
    }
}

fn at_position(e: Error, epoch: usize, batch: usize) -> Error {
    match e {
        Error::NonFinite { stage, loss, .. } => Error::NonFinite {
            stage,
            epoch,
            batch,
            loss,
        },
        other => other,
    }
}

/// Phase 1: one Adam step of encoder and generator on the reconstruction loss.
pub fn autoencoder_phase(
    model: &mut MixGanModel,
    x: &Matrix,
    config: &TrainConfig,
    opt: &mut OptimizerStates,
    rng: &mut dyn RngCore,
) -> Result<f64> {
    let (loss, enc_g, gen_g) = autoencoder_gradients(model, x, config.recon_weight, rng)?;
    finite("reconstruction", loss)?;
    opt.ae_encoder.step_mlp(&mut model.encoder, &enc_g)?;
    opt.ae_generator.step_mlp(&mut model.generator, &gen_g)?;
    Ok(loss)
}

/// Phase 2: one Adam step of the generator alone on the adversarial loss.
pub fn generator_phase(
    model: &mut MixGanModel,
    x: &Matrix,
    opt: &mut OptimizerStates,
    rng: &mut dyn RngCore,
) -> Result<f64> {
    let (loss, g) = generator_gradients(model, x, rng)?;
    finite("generator", loss)?;
    opt.generator.step_mlp(&mut model.generator, &g)?;
    Ok(loss)
}

/// Phase 3: one Adam step of the discriminator on the rows of `x` listed in
/// `real_rows`. Returns `None`, touching nothing, when the list is empty.
pub fn discriminator_phase(
    model: &mut MixGanModel,
    x: &Matrix,
    real_rows: &[usize],
    opt: &mut OptimizerStates,
) -> Result<Option<(f64, f64)>> {
    if real_rows.is_empty() {
        return Ok(None);
    }
    let (loss, g, acc) = discriminator_gradients(model, &x.select_rows(real_rows))?;
    finite("discriminator", loss)?;
    opt.discriminator.step_mlp(&mut model.discriminator, &g)?;
    Ok(Some((loss, acc)))
}

/// One iteration of the three-phase schedule on `batch`.
pub fn train_step(
    model: &mut MixGanModel,
    batch: &MixedBatch,
    config: &TrainConfig,
    opt: &mut OptimizerStates,
    rng: &mut dyn RngCore,
) -> Result<PhaseLosses> {
    let x = &batch.x_tilde;
    let reconstruction = autoencoder_phase(model, x, config, opt, rng)?;
    let generator = generator_phase(model, x, opt, rng)?;
    let real_rows = batch.real_rows();
    let disc = discriminator_phase(model, x, &real_rows, opt)?;
    Ok(PhaseLosses {
        reconstruction,
        generator,
        discriminator: disc.map(|d| d.0),
        discriminator_accuracy: disc.map(|d| d.1),
        real_rows: real_rows.len(),
    })
}

/// Stream that draws mixed batches: one draw from `rng`, offset by
/// `mixup.seed`, so batch composition can be varied on its own.
fn batch_stream(config: &TrainConfig, rng: &mut dyn RngCore) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(rng.next_u64() ^ config.mixup.seed)
}

fn batches_per_epoch(n: usize, batch_size: usize) -> usize {
    n.div_ceil(batch_size).max(1)
}

/// Autoencoder-only epochs on mixed batches; the discriminator is not touched.
pub fn pretrain_autoencoder(
    model: &mut MixGanModel,
    data: &FeatureDataset,
    config: &TrainConfig,
    opt: &mut OptimizerStates,
    rng: &mut dyn RngCore,
) -> Result<Vec<EpochRecord>> {
    config.validate()?;
    let batches = batches_per_epoch(data.len(), config.batch_size);
    let mut batch_rng = batch_stream(config, rng);
    let mut records = Vec::with_capacity(config.pretrain_epochs);
    for epoch in 1..=config.pretrain_epochs {
        let start = Instant::now();
        let mut total = 0.0;
        for b in 0..batches {
            let batch = make_mixed_batch(data, config.batch_size, &config.mixup, &mut batch_rng)?;
            total += autoencoder_phase(model, &batch.x_tilde, config, opt, rng)
                .map_err(|e| at_position(e, epoch, b))?;
        }
        records.push(EpochRecord {
            epoch,
            stage: Stage::Pretrain,
            reconstruction: total / batches as f64,
            generator: None,
            discriminator: None,
            discriminator_accuracy: None,
            holdout_accuracy: None,
            skipped_discriminator_updates: 0,
            wall_time_secs: start.elapsed().as_secs_f64(),
        });
    }
    Ok(records)
}

/// Share of `data` rows judged real plus reconstructions judged fake (eval mode).
pub fn discriminator_accuracy(model: &MixGanModel, data: &FeatureDataset) -> Result<f64> {
    let real = data.features();
    let fake = model.reconstruct(real)?;
    let p_real = model.discriminate(real)?;
    let p_fake = model.discriminate(&fake)?;
    let correct = p_real.iter().filter(|&&p| p > 0.5).count() + p_fake.iter().filter(|&&p| p <= 0.5).count();
    Ok(correct as f64 / (p_real.len() + p_fake.len()).max(1) as f64)
}

/// Pretraining followed by `config.epochs` adversarial epochs.
pub fn train(
    model: &mut MixGanModel,
    data: &FeatureDataset,
    config: &TrainConfig,
    rng: &mut dyn RngCore,
) -> Result<TrainRun> {
    train_monitored(model, data, None, config, rng)
}

/// [`train`], additionally recording discriminator accuracy on `holdout`
/// after every adversarial epoch.
pub fn train_monitored(
    model: &mut MixGanModel,
    data: &FeatureDataset,
    holdout: Option<&FeatureDataset>,
    config: &TrainConfig,
    rng: &mut dyn RngCore,
) -> Result<TrainRun> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if data.dim() != model.config().input_dim {
        return Err(Error::shape("training data columns", model.config().input_dim, data.dim()));
    }
    let mut opt = OptimizerStates::new(model, config);
    let mut log = TrainLog {
        records: pretrain_autoencoder(model, data, config, &mut opt, rng)?,
    };

    let batches = batches_per_epoch(data.len(), config.batch_size);
    let mut batch_rng = batch_stream(config, rng);
    for e in 1..=config.epochs {
        let epoch = config.pretrain_epochs + e;
        let start = Instant::now();
        let (mut recon, mut gen, mut disc) = (0.0, 0.0, 0.0);
        let (mut correct, mut seen, mut disc_steps, mut skipped) = (0.0, 0usize, 0usize, 0usize);
        for b in 0..batches {
            let batch = make_mixed_batch(data, config.batch_size, &config.mixup, &mut batch_rng)?;
            let losses = train_step(model, &batch, config, &mut opt, rng).map_err(|err| at_position(err, epoch, b))?;
            recon += losses.reconstruction;
            gen += losses.generator;
            match (losses.discriminator, losses.discriminator_accuracy) {
                (Some(d), Some(acc)) => {
                    disc += d;
                    disc_steps += 1;
                    correct += acc * (2 * losses.real_rows) as f64;
                    seen += 2 * losses.real_rows;
                }
                _ => skipped += 1,
            }
        }
        let holdout_accuracy = holdout.map(|h| discriminator_accuracy(model, h)).transpose()?;
        log.records.push(EpochRecord {
            epoch,
            stage: Stage::Adversarial,
            reconstruction: recon / batches as f64,
            generator: Some(gen / batches as f64),
            discriminator: (disc_steps > 0).then(|| disc / disc_steps as f64),
            discriminator_accuracy: (seen > 0).then(|| correct / seen as f64),
            holdout_accuracy,
            skipped_discriminator_updates: skipped,
            wall_time_secs: start.elapsed().as_secs_f64(),
        });
    }
    Ok(TrainRun { log, optimizers: opt })
}

/// One synthetic vector `G(E(x))` per row, keeping label, session and speaker.
pub fn generate_synthetic_dataset(model: &MixGanModel, data: &FeatureDataset) -> Result<FeatureDataset> {
    if data.dim() != model.config().input_dim {
        return Err(Error::shape("synthetic generation input", model.config().input_dim, data.dim()));
    }
    let synthetic = model.reconstruct(data.features())?;
    FeatureDataset::with_targets(
        data.corpus(),
        data.ids().iter().map(|id| format!("{id}_syn")).collect(),
        synthetic,
        data.labels().to_vec(),
        data.targets().clone(),
        data.sessions().to_vec(),
        data.speakers().to_vec(),
    )
}

/// Latent codes `E(x)` as a dataset with `latent_dim` feature columns.
pub fn encode_dataset(model: &MixGanModel, data: &FeatureDataset) -> Result<FeatureDataset> {
    if data.dim() != model.config().input_dim {
        return Err(Error::shape("encoder input", model.config().input_dim, data.dim()));
    }
    data.with_features(model.encode(data.features(), None)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_benchmark, BenchmarkConfig};
    use crate::model::MixGanConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy() -> (MixGanModel, FeatureDataset) {
        let data = make_benchmark(&BenchmarkConfig {
            n_per_class: 8,
            dim: 6,
            ..Default::default()
        })
        .unwrap();
        let cfg = MixGanConfig {
            input_dim: 6,
            latent_dim: 2,
            encoder_hidden: vec![5, 4],
            discriminator_hidden: vec![5, 5],
            ..Default::default()
        };
        (MixGanModel::new(cfg, &mut ChaCha8Rng::seed_from_u64(0)).unwrap(), data)
    }

    #[test]
    fn zero_pretrain_epochs_leave_model() {
        let (mut model, data) = toy();
        let before = model.clone();
        let cfg = TrainConfig {
            pretrain_epochs: 0,
            ..Default::default()
        };
        let mut opt = OptimizerStates::new(&model, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let recs = pretrain_autoencoder(&mut model, &data, &cfg, &mut opt, &mut rng).unwrap();
        assert!(recs.is_empty());
        assert_eq!(model, before);
    }

    #[test]
    fn log_length_and_synthetic_shape() {
        let (mut model, data) = toy();
        let cfg = TrainConfig {
            pretrain_epochs: 3,
            epochs: 4,
            batch_size: 8,
            ..Default::default()
        };
        let run = train(&mut model, &data, &cfg, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(run.log.len(), 7);
        assert!(run.log.records.iter().all(|r| r.reconstruction.is_finite()));
        let syn = generate_synthetic_dataset(&model, &data).unwrap();
        assert_eq!(syn.len(), data.len());
        assert_eq!(syn.labels(), data.labels());
        assert_eq!(syn.sessions(), data.sessions());
        let codes = encode_dataset(&model, &data).unwrap();
        assert_eq!(codes.dim(), 2);
        let mut csv = Vec::new();
        run.log.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 8);
    }

    #[test]
    fn nonfinite_input_aborts_with_position() {
        let (mut model, data) = toy();
        // blow up the weights so the reconstruction overflows
        for l in model.generator.layers_mut() {
            l.weights.as_mut_slice().iter_mut().for_each(|w| *w = 1e200);
        }
        let cfg = TrainConfig {
            pretrain_epochs: 2,
            epochs: 1,
            batch_size: 8,
            ..Default::default()
        };
        let err = train(&mut model, &data, &cfg, &mut ChaCha8Rng::seed_from_u64(3)).unwrap_err();
        assert!(matches!(err, Error::NonFinite { stage: "reconstruction", epoch: 1, batch: 0, .. }), "{err}");
    }
}
