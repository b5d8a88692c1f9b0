use rand::seq::SliceRandom;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::metrics::{confusion, uar, ConfusionMatrix};
use crate::data::{FeatureDataset, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::nn::{softmax_ce_soft_loss, softmax_rows, Activation, AdamState, Matrix, Mlp, DEFAULT_LEAKY_SLOPE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub hidden_units: usize,
    pub hidden_layers: usize,
    /// Drop probability after every hidden layer.
    pub dropout_rate: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub leaky_slope: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self::real_only()
    }
}

impl ClassifierConfig {
    pub fn real_only() -> Self {
        Self {
            hidden_units: 400,
            hidden_layers: 2,
            dropout_rate: 0.5,
            learning_rate: 1e-5,
            epochs: 300,
            batch_size: 64,
            leaky_slope: DEFAULT_LEAKY_SLOPE,
        }
    }

    pub fn synthetic_only() -> Self {
        Self::real_only()
    }

    pub fn real_plus_synthetic() -> Self {
        Self {
            hidden_units: 1000,
            ..Self::real_only()
        }
    }

    pub fn cross_corpus() -> Self {
        Self {
            dropout_rate: 0.8,
            ..Self::real_only()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden_units == 0 || self.hidden_layers == 0 || self.batch_size == 0 {
            return Err(Error::Config(
                "classifier hidden_units, hidden_layers and batch_size must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::Config(format!(
                "classifier dropout_rate must lie in [0, 1), got {}",
                self.dropout_rate
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("classifier learning_rate must be positive".into()));
        }
        Ok(())
    }
}

/// Feed-forward classifier producing class logits; probabilities come from
/// a softmax over them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    pub network: Mlp,
}

impl Classifier {
    pub fn new<R: rand::Rng + ?Sized>(dim: usize, config: &ClassifierConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let mut dims = vec![dim];
        dims.extend(std::iter::repeat_n(config.hidden_units, config.hidden_layers));
        dims.push(NUM_CLASSES);
        let network = Mlp::with_dims(
            &dims,
            Activation::LeakyRelu {
                slope: config.leaky_slope,
            },
            Activation::Linear,
            config.dropout_rate,
            (0..config.hidden_layers).collect(),
            rng,
        )?;
        Ok(Self { network })
    }

    pub fn predict_proba(&self, x: &Matrix) -> Result<Matrix> {
        Ok(softmax_rows(&self.network.predict(x)?))
    }

    /// Argmax class per row; ties go to the lower index.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<usize>> {
        let logits = self.network.predict(x)?;
        Ok(logits
            .row_iter()
            .map(|row| {
                let mut best = 0;
                for (c, &v) in row.iter().enumerate() {
                    if v > row[best] {
                        best = c;
                    }
                }
                best
            })
            .collect())
    }

    pub fn confusion(&self, data: &FeatureDataset) -> Result<ConfusionMatrix> {
        confusion(&data.label_indices(), &self.predict(data.features())?, NUM_CLASSES)
    }
}

#[derive(Debug, Clone)]
pub struct ClassifierFit {
    pub classifier: Classifier,
    /// Mean training cross-entropy per epoch (train mode).
    pub epoch_losses: Vec<f64>,
    /// 1-based epoch the returned weights come from.
    pub selected_epoch: usize,
}

/// Cross-entropy training against the dataset's target distributions, so
/// mixed soft labels work unchanged.
pub fn train_classifier(
    train: &FeatureDataset,
    config: &ClassifierConfig,
    rng: &mut dyn RngCore,
) -> Result<ClassifierFit> {
    fit(train, None, config, rng)
}

/// Like [`train_classifier`], but returns the snapshot with the best UAR on
/// `dev` (earliest epoch on ties).
pub fn train_classifier_tuned(
    train: &FeatureDataset,
    dev: &FeatureDataset,
    config: &ClassifierConfig,
    rng: &mut dyn RngCore,
) -> Result<ClassifierFit> {
    fit(train, Some(dev), config, rng)
}

fn fit(
    train: &FeatureDataset,
    dev: Option<&FeatureDataset>,
    config: &ClassifierConfig,
    rng: &mut dyn RngCore,
) -> Result<ClassifierFit> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if let Some(d) = dev {
        if d.dim() != train.dim() {
            return Err(Error::shape("dev set columns", train.dim(), d.dim()));
        }
    }
    let mut classifier = Classifier::new(train.dim(), config, rng)?;
    let mut opt = AdamState::for_mlp(config.learning_rate, &classifier.network);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, usize, Classifier)> = None;

    for epoch in 1..=config.epochs {
        order.shuffle(rng);
        let mut total = 0.0;
        for (b, chunk) in order.chunks(config.batch_size).enumerate() {
            let x = train.features().select_rows(chunk);
            let y = train.targets().select_rows(chunk);
            let cache = classifier.network.forward(&x, Some(&mut *rng))?;
            let (loss, grad) = softmax_ce_soft_loss(cache.output(), &y)?;
            if !loss.is_finite() {
                return Err(Error::NonFinite {
                    stage: "classifier",
                    epoch,
                    batch: b,
                    loss,
                });
            }
            let grads = classifier.network.backward(&cache, &grad)?;
            opt.step_mlp(&mut classifier.network, &grads)?;
            total += loss * chunk.len() as f64;
        }
        epoch_losses.push(total / train.len() as f64);

        if let Some(d) = dev {
            let score = uar(&classifier.confusion(d)?)?;
            if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
                best = Some((score, epoch, classifier.clone()));
            }
        }
    }

    let (classifier, selected_epoch) = match best {
        Some((_, epoch, c)) => (c, epoch),
        None => (classifier, config.epochs),
    };
    Ok(ClassifierFit {
        classifier,
        epoch_losses,
        selected_epoch,
    })
}
