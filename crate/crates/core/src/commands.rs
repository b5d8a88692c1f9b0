//! The work behind each command-line subcommand.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::checkpoint::{load_checkpoint, save_checkpoint, ModelCheckpoint};
use crate::config::{DataSource, RunConfig};
use crate::data::{fit_normalizer, load_feature_csv, make_benchmark, write_feature_csv, BenchmarkConfig, FeatureDataset, NormKind, NormalizationStats};
use crate::error::{Error, Result};
use crate::eval::{run_cross_corpus, run_encoded, run_within_corpus, ExperimentKind, ExperimentReport};
use crate::model::{MixGanConfig, MixGanModel};
use crate::training::{encode_dataset, generate_synthetic_dataset, train};

pub const CHECKPOINT_FILE: &str = "model.ckpt";
pub const NORMALIZER_FILE: &str = "normalizer.json";
pub const TRAIN_LOG_FILE: &str = "train_log.csv";
pub const TIMING_FILE: &str = "train_timing.csv";
pub const CONFIG_FILE: &str = "config.toml";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";
pub const CONFUSION_CSV: &str = "confusion.csv";
pub const SUMMARY_FILE: &str = "summary.txt";

/// Process exit code for an error: 2 configuration, 3 data, 4 numerical.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidArgument(_) => 2,
        Error::NonFinite { .. } => 4,
        _ => 3,
    }
}

pub fn load_source(src: &DataSource) -> Result<FeatureDataset> {
    match (&src.path, &src.benchmark) {
        (Some(p), _) => Ok(load_feature_csv(p)?),
        (None, Some(b)) => make_benchmark(b),
        (None, None) => Err(Error::Config("data: missing data.path (or data.benchmark)".into())),
    }
}

/// `<output_dir>/<config hash>-<unix seconds>`
pub fn default_run_dir(cfg: &RunConfig) -> PathBuf {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    cfg.output_dir.join(format!("{}-{secs}", cfg.hash()))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn refuse_overwrite(path: &Path, force: bool) -> Result<()> {
    if path.exists() && !force {
        return Err(Error::InvalidArgument(format!(
            "{} already exists (pass --force to overwrite)",
            path.display()
        )));
    }
    Ok(())
}

fn prepare_run_dir(cfg: &RunConfig, run_dir: &Path) -> Result<()> {
    fs::create_dir_all(run_dir).map_err(|e| Error::io(run_dir, e))?;
    write_file(&run_dir.join(CONFIG_FILE), cfg.to_toml()?)
}

pub fn cmd_benchmark(config: &BenchmarkConfig, out: &Path, force: bool) -> Result<FeatureDataset> {
    refuse_overwrite(out, force)?;
    let data = make_benchmark(config)?;
    let file = fs::File::create(out).map_err(|e| Error::io(out, e))?;
    write_feature_csv(&data, std::io::BufWriter::new(file))?;
    Ok(data)
}

#[derive(Debug, Clone)]
pub struct TrainOutputs {
    pub checkpoint: PathBuf,
    pub train_log: PathBuf,
    pub normalizer: PathBuf,
}

/// Min-max normalises the configured data, trains the model with
/// `train.seed` and writes the checkpoint, normaliser, logs and the config.
pub fn cmd_train(cfg: &RunConfig, run_dir: &Path) -> Result<TrainOutputs> {
    cfg.validate()?;
    let raw = load_source(&cfg.data)?;
    let norm = fit_normalizer(&raw, NormKind::MinMax)?;
    let data = norm.apply(&raw)?;
    prepare_run_dir(cfg, run_dir)?;

    let model_cfg = MixGanConfig {
        input_dim: data.dim(),
        ..cfg.model.clone()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.train.seed);
    let mut model = MixGanModel::new(model_cfg, &mut rng)?;
    let run = train(&mut model, &data, &cfg.train, &mut rng)?;

    let out = TrainOutputs {
        checkpoint: run_dir.join(CHECKPOINT_FILE),
        train_log: run_dir.join(TRAIN_LOG_FILE),
        normalizer: run_dir.join(NORMALIZER_FILE),
    };
    let epochs = (cfg.train.pretrain_epochs + cfg.train.epochs) as u64;
    save_checkpoint(&ModelCheckpoint::new(model, Some(run.optimizers), epochs), &out.checkpoint)?;
    write_file(&out.normalizer, serde_json::to_string_pretty(&norm)?)?;
    let mut log = Vec::new();
    run.log.write_csv(&mut log).map_err(|e| Error::io(&out.train_log, e))?;
    write_file(&out.train_log, log)?;
    let mut timing = Vec::new();
    run.log.write_timing_csv(&mut timing).map_err(|e| Error::io(run_dir, e))?;
    write_file(&run_dir.join(TIMING_FILE), timing)?;
    Ok(out)
}

fn load_for_inference(checkpoint: &Path, data: &Path, normalizer: Option<&Path>) -> Result<(MixGanModel, FeatureDataset, Option<NormalizationStats>)> {
    let model = load_checkpoint(checkpoint)?.model;
    let mut rows = load_feature_csv(data)?;
    let norm = match normalizer {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            let n: NormalizationStats = serde_json::from_str(&text)?;
            rows = n.apply(&rows)?;
            Some(n)
        }
        None => None,
    };
    if rows.dim() != model.config().input_dim {
        return Err(Error::shape(
            format!("{} feature columns for this checkpoint", data.display()),
            model.config().input_dim,
            rows.dim(),
        ));
    }
    Ok((model, rows, norm))
}

fn write_dataset(data: &FeatureDataset, out: &Path) -> Result<()> {
    let file = fs::File::create(out).map_err(|e| Error::io(out, e))?;
    write_feature_csv(data, std::io::BufWriter::new(file))?;
    Ok(())
}

/// Writes `G(E(x))` for every row of `data`. With a normaliser the input is
/// normalised first and the output mapped back to the original scale.
pub fn cmd_generate(checkpoint: &Path, data: &Path, out: &Path, normalizer: Option<&Path>, force: bool) -> Result<FeatureDataset> {
    refuse_overwrite(out, force)?;
    let (model, rows, norm) = load_for_inference(checkpoint, data, normalizer)?;
    let mut synthetic = generate_synthetic_dataset(&model, &rows)?;
    if let Some(n) = norm {
        synthetic = synthetic.with_features(n.inverse(synthetic.features())?)?;
    }
    write_dataset(&synthetic, out)?;
    Ok(synthetic)
}

/// Writes the latent code `E(x)` for every row of `data`.
pub fn cmd_encode(checkpoint: &Path, data: &Path, out: &Path, normalizer: Option<&Path>, force: bool) -> Result<FeatureDataset> {
    refuse_overwrite(out, force)?;
    let (model, rows, _) = load_for_inference(checkpoint, data, normalizer)?;
    let codes = encode_dataset(&model, &rows)?;
    write_dataset(&codes, out)?;
    Ok(codes)
}

/// Runs the configured experiment and writes JSON, CSV, confusion-matrix
/// and plain-text reports plus a copy of the config into `run_dir`.
pub fn cmd_evaluate(cfg: &RunConfig, run_dir: &Path) -> Result<ExperimentReport> {
    cfg.validate()?;
    let data = load_source(&cfg.data)?;
    let exp = cfg.experiment_config();
    prepare_run_dir(cfg, run_dir)?;
    let report = match cfg.experiment {
        ExperimentKind::Within => run_within_corpus(&data, &exp)?,
        ExperimentKind::Encoded => run_encoded(&data, &exp)?,
        ExperimentKind::Cross => {
            let target = cfg.target.as_ref().expect("validated");
            run_cross_corpus(&data, &load_source(target)?, &exp)?
        }
    };
    write_report(&report, run_dir)?;
    Ok(report)
}

pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<()> {
    write_file(&dir.join(REPORT_JSON), report.to_json()?)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    write_file(&dir.join(REPORT_CSV), csv)?;
    let mut cm = Vec::new();
    report.write_confusion_csv(&mut cm).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join(CONFUSION_CSV), cm)?;
    write_file(&dir.join(SUMMARY_FILE), report.summary())
}

pub fn cmd_report(report_json: &Path) -> Result<ExperimentReport> {
    let text = fs::read_to_string(report_json).map_err(|e| Error::io(report_json, e))?;
    ExperimentReport::from_json(&text)
}
