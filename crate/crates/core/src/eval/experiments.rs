//! Experiment drivers.
//!
//! Every driver is built from a public per-fold function that receives the
//! train and test rows separately and returns a digest of everything it
//! trained, so tests can check that test rows never reach a fitted parameter.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::classifier::{train_classifier, train_classifier_tuned, ClassifierConfig};
use super::metrics::{uar, ConfusionMatrix};
use super::report::{reference_annotation, EvalReport, ExperimentKind, ExperimentReport, FeatureSource, FoldResult, SeedResult};
use crate::baselines::{baseline_ae_train, pca_fit, BaselineAeConfig};
use crate::data::{fit_normalizer, loso_splits, stratified_split, Emotion, FeatureDataset, NormKind, NormalizationStats, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::mixup::{make_mixed_batch, MixupConfig};
use crate::model::{MixGanConfig, MixGanModel};
use crate::nn::{Matrix, Mlp};
use crate::training::{encode_dataset, generate_synthetic_dataset, train, TrainConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SettingClassifiers {
    pub real: ClassifierConfig,
    pub synthetic: ClassifierConfig,
    pub real_plus_synthetic: ClassifierConfig,
}

impl Default for SettingClassifiers {
    fn default() -> Self {
        Self {
            real: ClassifierConfig::real_only(),
            synthetic: ClassifierConfig::synthetic_only(),
            real_plus_synthetic: ClassifierConfig::real_plus_synthetic(),
        }
    }
}

impl SettingClassifiers {
    pub fn cross_corpus() -> Self {
        let c = ClassifierConfig::cross_corpus();
        Self {
            real: c.clone(),
            synthetic: c.clone(),
            real_plus_synthetic: c,
        }
    }

    fn validate(&self) -> Result<()> {
        self.real.validate()?;
        self.synthetic.validate()?;
        self.real_plus_synthetic.validate()
    }
}

/// Which test features the synthetic-only classifier is scored on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyntheticTest {
    Synthetic,
    Real,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reducer {
    Proposed,
    Pca,
    Autoencoder,
}

impl Reducer {
    pub const ALL: [Reducer; 3] = [Reducer::Proposed, Reducer::Pca, Reducer::Autoencoder];

    pub fn name(self) -> &'static str {
        match self {
            Reducer::Proposed => "proposed",
            Reducer::Pca => "pca",
            Reducer::Autoencoder => "autoencoder",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncodedOptions {
    pub k: usize,
    pub reducers: Vec<Reducer>,
    pub baseline_ae: BaselineAeConfig,
    pub classifier: ClassifierConfig,
}

impl Default for EncodedOptions {
    fn default() -> Self {
        Self {
            k: 25,
            reducers: Reducer::ALL.to_vec(),
            baseline_ae: BaselineAeConfig::default(),
            classifier: ClassifierConfig::real_only(),
        }
    }
}

/// Settings shared by all three drivers. `model.input_dim` is replaced by
/// the data's width (and `model.latent_dim` by `encoded.k` in the encoded
/// driver).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: MixGanConfig,
    pub train: TrainConfig,
    pub classifiers: SettingClassifiers,
    pub cross_classifiers: SettingClassifiers,
    pub encoded: EncodedOptions,
    pub synthetic_test: SyntheticTest,
    pub dev_fraction: f64,
    pub seeds: Vec<u64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: MixGanConfig::default(),
            train: TrainConfig::default(),
            classifiers: SettingClassifiers::default(),
            cross_classifiers: SettingClassifiers::cross_corpus(),
            encoded: EncodedOptions::default(),
            synthetic_test: SyntheticTest::Synthetic,
            dev_fraction: 0.3,
            seeds: vec![1, 2, 3, 4, 5],
        }
    }
}

impl ExperimentConfig {
    /// Reduced widths and epoch budgets that finish in seconds per fold on
    /// the 64-d Gaussian benchmark.
    pub fn benchmark() -> Self {
        let clf = |units: usize, dropout: f64| ClassifierConfig {
            hidden_units: units,
            dropout_rate: dropout,
            learning_rate: 1e-3,
            epochs: 40,
            ..ClassifierConfig::real_only()
        };
        let within = SettingClassifiers {
            real: clf(32, 0.5),
            synthetic: clf(32, 0.5),
            real_plus_synthetic: clf(80, 0.5),
        };
        let cross = SettingClassifiers {
            real: clf(32, 0.8),
            synthetic: clf(32, 0.8),
            real_plus_synthetic: clf(32, 0.8),
        };
        Self {
            model: MixGanConfig {
                input_dim: 64,
                encoder_hidden: vec![128, 64],
                discriminator_hidden: vec![128, 128],
                ..MixGanConfig::default()
            },
            train: TrainConfig {
                pretrain_epochs: 100,
                epochs: 50,
                lr_autoencoder: 3e-3,
                ..TrainConfig::default()
            },
            classifiers: within,
            cross_classifiers: cross,
            encoded: EncodedOptions {
                k: 2,
                reducers: Reducer::ALL.to_vec(),
                baseline_ae: BaselineAeConfig {
                    hidden: vec![64, 32],
                    epochs: 100,
                    learning_rate: 3e-3,
                    ..BaselineAeConfig::default()
                },
                classifier: clf(32, 0.5),
            },
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.train.validate()?;
        self.classifiers.validate()?;
        self.cross_classifiers.validate()?;
        self.encoded.baseline_ae.validate()?;
        self.encoded.classifier.validate()?;
        if self.encoded.k == 0 {
            return Err(Error::Config("encoded.k must be positive".into()));
        }
        if self.encoded.reducers.is_empty() {
            return Err(Error::Config("encoded.reducers must not be empty".into()));
        }
        if !(self.dev_fraction > 0.0 && self.dev_fraction < 1.0) {
            return Err(Error::Config("dev_fraction must lie in (0, 1)".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must list at least one seed".into()));
        }
        Ok(())
    }
}

/// Independent rng stream for one component of one fold.
pub fn stream(seed: u64, fold: usize, tag: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((fold as u64).to_le_bytes());
    h.update(tag.as_bytes());
    let d = h.finalize();
    ChaCha8Rng::from_seed(d.into())
}

/// SHA-256 over fitted parameters.
#[derive(Default)]
pub struct ParamDigest(Sha256);

impl ParamDigest {
    pub fn values(&mut self, label: &str, values: &[f64]) {
        self.0.update(label.as_bytes());
        self.0.update((values.len() as u64).to_le_bytes());
        for v in values {
            self.0.update(v.to_le_bytes());
        }
    }

    pub fn mlp(&mut self, label: &str, net: &Mlp) {
        self.values(label, &net.flat_params());
    }

    pub fn model(&mut self, label: &str, m: &MixGanModel) {
        self.mlp(&format!("{label}.encoder"), &m.encoder);
        self.mlp(&format!("{label}.generator"), &m.generator);
        self.mlp(&format!("{label}.discriminator"), &m.discriminator);
    }

    pub fn normalizer(&mut self, label: &str, n: &NormalizationStats) {
        self.values(&format!("{label}.offset"), &n.offset);
        self.values(&format!("{label}.spread"), &n.spread);
    }

    pub fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

#[derive(Debug, Clone)]
pub struct SettingOutcome {
    pub setting: String,
    pub feature_source: FeatureSource,
    pub confusion: ConfusionMatrix,
}

#[derive(Debug, Clone)]
pub struct FoldOutcome {
    pub settings: Vec<SettingOutcome>,
    /// Hex SHA-256 of every normaliser, network and classifier fitted in the fold.
    pub digest: String,
}

fn train_mixgan(
    data: &FeatureDataset,
    cfg: &ExperimentConfig,
    latent_dim: usize,
    mixup: &MixupConfig,
    seed: u64,
    fold: usize,
    tag: &str,
) -> Result<MixGanModel> {
    let model_cfg = MixGanConfig {
        input_dim: data.dim(),
        latent_dim,
        ..cfg.model.clone()
    };
    let train_cfg = TrainConfig {
        mixup: mixup.clone(),
        ..cfg.train.clone()
    };
    let mut rng = stream(seed, fold, tag);
    let mut model = MixGanModel::new(model_cfg, &mut rng)?;
    train(&mut model, data, &train_cfg, &mut rng)?;
    Ok(model)
}

#[allow(clippy::too_many_arguments)]
fn fit_and_score(
    setting: &str,
    source: FeatureSource,
    train: &FeatureDataset,
    dev: Option<&FeatureDataset>,
    test: &FeatureDataset,
    config: &ClassifierConfig,
    seed: u64,
    fold: usize,
    digest: &mut ParamDigest,
) -> Result<SettingOutcome> {
    let mut rng = stream(seed, fold, &format!("classifier/{setting}"));
    let fit = match dev {
        Some(d) => train_classifier_tuned(train, d, config, &mut rng)?,
        None => train_classifier(train, config, &mut rng)?,
    };
    digest.mlp(&format!("classifier/{setting}"), &fit.classifier.network);
    Ok(SettingOutcome {
        setting: setting.to_string(),
        feature_source: source,
        confusion: fit.classifier.confusion(test)?,
    })
}

/// One leave-one-session-out fold: min-max normalise on `train`, train the
/// model on `train`, then score the real, synthetic and real+synthetic
/// classifiers.
pub fn within_corpus_fold(
    train: &FeatureDataset,
    test: &FeatureDataset,
    cfg: &ExperimentConfig,
    seed: u64,
    fold: usize,
) -> Result<FoldOutcome> {
    let mut digest = ParamDigest::default();
    let norm = fit_normalizer(train, NormKind::MinMax)?;
    digest.normalizer("norm", &norm);
    let (train, test) = (norm.apply(train)?, norm.apply(test)?);

    let model = train_mixgan(&train, cfg, cfg.model.latent_dim, &cfg.train.mixup, seed, fold, "mixgan")?;
    digest.model("mixgan", &model);
    let syn_train = generate_synthetic_dataset(&model, &train)?;
    let syn_test = match cfg.synthetic_test {
        SyntheticTest::Synthetic => generate_synthetic_dataset(&model, &test)?,
        SyntheticTest::Real => test.clone(),
    };
    let both = train.concat(&syn_train)?;
    let c = &cfg.classifiers;

    let settings = vec![
        fit_and_score("real", FeatureSource::Real, &train, None, &test, &c.real, seed, fold, &mut digest)?,
        fit_and_score(
            "synthetic",
            FeatureSource::Synthetic,
            &syn_train,
            None,
            &syn_test,
            &c.synthetic,
            seed,
            fold,
            &mut digest,
        )?,
        fit_and_score(
            "real+synthetic",
            FeatureSource::RealPlusSynthetic,
            &both,
            None,
            &test,
            &c.real_plus_synthetic,
            seed,
            fold,
            &mut digest,
        )?,
    ];
    Ok(FoldOutcome {
        settings,
        digest: digest.finish(),
    })
}

/// Codes for `train` (possibly mixed) and `test`, z-scored with statistics
/// of the training codes.
fn zscore_codes(train_codes: Matrix, test_codes: Matrix) -> Result<(Matrix, Matrix, NormalizationStats)> {
    let stats = NormalizationStats::fit(&train_codes, NormKind::ZScore, "codes")?;
    Ok((stats.transform(&train_codes)?, stats.transform(&test_codes)?, stats))
}

/// One fold of the encoded-feature comparison: for each reducer, with and
/// without mixup, fit on `train`, encode both sides and score a classifier
/// on the codes.
///
/// With mixup the classifier sees codes of one mixed matrix (same size as
/// `train`) with its soft labels, and PCA is fitted on that same matrix.
pub fn encoded_fold(
    train: &FeatureDataset,
    test: &FeatureDataset,
    cfg: &ExperimentConfig,
    seed: u64,
    fold: usize,
) -> Result<FoldOutcome> {
    let k = cfg.encoded.k;
    if k >= train.dim() {
        return Err(Error::InvalidArgument(format!("encoded k={k} must be below the feature width {}", train.dim())));
    }
    let mut digest = ParamDigest::default();
    let norm = fit_normalizer(train, NormKind::MinMax)?;
    digest.normalizer("norm", &norm);
    let (train, test) = (norm.apply(train)?, norm.apply(test)?);

    let mut settings = Vec::new();
    for &reducer in &cfg.encoded.reducers {
        for with_mixup in [false, true] {
            let setting = if with_mixup {
                format!("{}+mixup", reducer.name())
            } else {
                reducer.name().to_string()
            };
            let mixup = if with_mixup {
                cfg.train.mixup.clone()
            } else {
                MixupConfig::disabled()
            };
            let fit_rows = if with_mixup {
                let mut rng = stream(seed, fold, &format!("mixed/{setting}"));
                make_mixed_batch(&train, train.len(), &mixup, &mut rng)?.to_dataset(&train)?
            } else {
                train.clone()
            };

            let (train_codes, test_codes) = match reducer {
                Reducer::Proposed => {
                    let model = train_mixgan(&train, cfg, k, &mixup, seed, fold, &setting)?;
                    digest.model(&setting, &model);
                    (
                        encode_dataset(&model, &fit_rows)?.features().clone(),
                        encode_dataset(&model, &test)?.features().clone(),
                    )
                }
                Reducer::Pca => {
                    let pca = pca_fit(fit_rows.features(), k)?;
                    digest.values(&setting, pca.components.as_slice());
                    (pca.transform(fit_rows.features())?, pca.transform(test.features())?)
                }
                Reducer::Autoencoder => {
                    let mut rng = stream(seed, fold, &setting);
                    let ae = baseline_ae_train(&train, k, &cfg.encoded.baseline_ae, &mixup, &mut rng)?;
                    digest.mlp(&format!("{setting}.encoder"), &ae.encoder);
                    digest.mlp(&format!("{setting}.decoder"), &ae.decoder);
                    (ae.encode(fit_rows.features())?, ae.encode(test.features())?)
                }
            };
            let (train_codes, test_codes, stats) = zscore_codes(train_codes, test_codes)?;
            digest.normalizer(&format!("{setting}.codes"), &stats);
            settings.push(fit_and_score(
                &setting,
                FeatureSource::Encoded,
                &fit_rows.with_features(train_codes)?,
                None,
                &test.with_features(test_codes)?,
                &cfg.encoded.classifier,
                seed,
                fold,
                &mut digest,
            )?);
        }
    }
    Ok(FoldOutcome {
        settings,
        digest: digest.finish(),
    })
}

/// Stratified `(dev, test)` split of the target corpus for one seed.
pub fn cross_corpus_split(
    target: &FeatureDataset,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<(FeatureDataset, FeatureDataset)> {
    stratified_split(target, cfg.dev_fraction, seed)
}

/// Train on the whole source corpus and score on the target test rows,
/// choosing each classifier's epoch by its UAR on the target dev rows.
///
/// Each corpus is z-normalised with its own statistics; the target's come
/// from the dev rows only.
pub fn cross_corpus_run(
    source: &FeatureDataset,
    dev: &FeatureDataset,
    test: &FeatureDataset,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<FoldOutcome> {
    if source.dim() != dev.dim() || dev.dim() != test.dim() {
        return Err(Error::shape("target corpus columns", source.dim(), dev.dim().max(test.dim())));
    }
    let mut digest = ParamDigest::default();
    let src_norm = fit_normalizer(source, NormKind::ZScore)?;
    let tgt_norm = fit_normalizer(dev, NormKind::ZScore)?;
    digest.normalizer("source_norm", &src_norm);
    digest.normalizer("target_norm", &tgt_norm);
    let source = src_norm.apply(source)?;
    let (dev, test) = (tgt_norm.apply(dev)?, tgt_norm.apply(test)?);

    let model = train_mixgan(&source, cfg, cfg.model.latent_dim, &cfg.train.mixup, seed, 0, "mixgan")?;
    digest.model("mixgan", &model);
    let syn_source = generate_synthetic_dataset(&model, &source)?;
    let (syn_dev, syn_test) = match cfg.synthetic_test {
        SyntheticTest::Synthetic => (
            generate_synthetic_dataset(&model, &dev)?,
            generate_synthetic_dataset(&model, &test)?,
        ),
        SyntheticTest::Real => (dev.clone(), test.clone()),
    };
    let both = source.concat(&syn_source)?;
    let c = &cfg.cross_classifiers;

    let settings = vec![
        fit_and_score("real", FeatureSource::Real, &source, Some(&dev), &test, &c.real, seed, 0, &mut digest)?,
        fit_and_score(
            "synthetic",
            FeatureSource::Synthetic,
            &syn_source,
            Some(&syn_dev),
            &syn_test,
            &c.synthetic,
            seed,
            0,
            &mut digest,
        )?,
        fit_and_score(
            "real+synthetic",
            FeatureSource::RealPlusSynthetic,
            &both,
            Some(&dev),
            &test,
            &c.real_plus_synthetic,
            seed,
            0,
            &mut digest,
        )?,
    ];
    Ok(FoldOutcome {
        settings,
        digest: digest.finish(),
    })
}

/// Collects fold outcomes into per-setting reports.
struct Aggregator {
    experiment: ExperimentKind,
    names: Vec<(String, FeatureSource)>,
    seeds: Vec<Vec<SeedResult>>,
    confusion: Vec<ConfusionMatrix>,
    warnings: Vec<Vec<String>>,
}

impl Aggregator {
    fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            names: Vec::new(),
            seeds: Vec::new(),
            confusion: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn add(&mut self, seed: u64, fold: &str, outcome: &FoldOutcome) -> Result<()> {
        for s in &outcome.settings {
            let idx = match self.names.iter().position(|(n, _)| *n == s.setting) {
                Some(i) => i,
                None => {
                    self.names.push((s.setting.clone(), s.feature_source));
                    self.seeds.push(Vec::new());
                    self.confusion.push(ConfusionMatrix::new(NUM_CLASSES));
                    self.warnings.push(Vec::new());
                    self.names.len() - 1
                }
            };
            for c in s.confusion.empty_classes() {
                let class = Emotion::from_index(c).map_or("?", |e| e.name());
                self.warnings[idx].push(format!(
                    "seed {seed} fold {fold}: class {class} absent from the test rows and left out of UAR"
                ));
            }
            self.confusion[idx].merge(&s.confusion)?;
            let result = FoldResult {
                fold: fold.to_string(),
                uar: uar(&s.confusion)?,
                support: (0..NUM_CLASSES).map(|c| s.confusion.row_sum(c)).collect(),
            };
            let seeds = &mut self.seeds[idx];
            match seeds.iter_mut().find(|r| r.seed == seed) {
                Some(r) => r.folds.push(result),
                None => seeds.push(SeedResult {
                    seed,
                    uar: 0.0,
                    folds: vec![result],
                }),
            }
        }
        Ok(())
    }

    fn finish(self, corpus: &str) -> ExperimentReport {
        let experiment = self.experiment;
        let settings = self
            .names
            .into_iter()
            .zip(self.seeds)
            .zip(self.confusion)
            .zip(self.warnings)
            .map(|((((name, source), mut seeds), confusion), warnings)| {
                for s in &mut seeds {
                    s.uar = s.folds.iter().map(|f| f.uar).sum::<f64>() / s.folds.len() as f64;
                }
                let reference = reference_annotation(experiment, &name);
                EvalReport::from_seeds(name, source, seeds, confusion, warnings, reference)
            })
            .collect();
        ExperimentReport {
            experiment,
            corpus: corpus.to_string(),
            settings,
        }
    }
}

/// Leave-one-session-out evaluation of the real, synthetic and
/// real+synthetic settings for every seed.
pub fn run_within_corpus(data: &FeatureDataset, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let folds = loso_splits(data)?;
    let mut agg = Aggregator::new(ExperimentKind::Within);
    for &seed in &cfg.seeds {
        for (i, fold) in folds.iter().enumerate() {
            let outcome = within_corpus_fold(&fold.train, &fold.test, cfg, seed, i)?;
            agg.add(seed, &fold.session, &outcome)?;
        }
    }
    Ok(agg.finish(data.corpus()))
}

/// Leave-one-session-out comparison of the configured reducers, each with
/// and without mixup.
pub fn run_encoded(data: &FeatureDataset, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let folds = loso_splits(data)?;
    let mut agg = Aggregator::new(ExperimentKind::Encoded);
    for &seed in &cfg.seeds {
        for (i, fold) in folds.iter().enumerate() {
            let outcome = encoded_fold(&fold.train, &fold.test, cfg, seed, i)?;
            agg.add(seed, &fold.session, &outcome)?;
        }
    }
    Ok(agg.finish(data.corpus()))
}

/// Source-trained models scored on a stratified test split of `target`,
/// with a fresh dev/test split per seed.
pub fn run_cross_corpus(
    source: &FeatureDataset,
    target: &FeatureDataset,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut agg = Aggregator::new(ExperimentKind::Cross);
    for &seed in &cfg.seeds {
        let (dev, test) = cross_corpus_split(target, cfg, seed)?;
        let outcome = cross_corpus_run(source, &dev, &test, cfg, seed)?;
        agg.add(seed, "test", &outcome)?;
    }
    Ok(agg.finish(&format!("{}->{}", source.corpus(), target.corpus())))
}
