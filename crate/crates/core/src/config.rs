//! Run configuration read from TOML.
//!
//! Unknown keys are rejected while parsing; [`RunConfig::validate`] then
//! checks values and reports the offending field by its dotted path.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::BenchmarkConfig;
use crate::error::{Error, Result};
use crate::eval::{EncodedOptions, ExperimentConfig, ExperimentKind, SettingClassifiers, SyntheticTest};
use crate::model::MixGanConfig;
use crate::training::TrainConfig;

/// A feature CSV or a generated benchmark; exactly one must be set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSource {
    pub path: Option<PathBuf>,
    pub benchmark: Option<BenchmarkConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub output_dir: PathBuf,
    pub seeds: Vec<u64>,
    pub data: DataSource,
    /// Target corpus; required for the cross-corpus experiment.
    pub target: Option<DataSource>,
    pub model: MixGanConfig,
    pub train: TrainConfig,
    pub classifiers: SettingClassifiers,
    pub cross_classifiers: SettingClassifiers,
    pub encoded: EncodedOptions,
    pub synthetic_test: SyntheticTest,
    pub dev_fraction: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let e = ExperimentConfig::default();
        Self {
            experiment: ExperimentKind::Within,
            output_dir: PathBuf::from("runs"),
            seeds: e.seeds,
            data: DataSource::default(),
            target: None,
            model: e.model,
            train: e.train,
            classifiers: e.classifiers,
            cross_classifiers: e.cross_classifiers,
            encoded: e.encoded,
            synthetic_test: e.synthetic_test,
            dev_fraction: e.dev_fraction,
        }
    }
}

fn at(field: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Config(msg) | Error::InvalidArgument(msg) => Error::Config(format!("{field}: {msg}")),
        other => other,
    }
}

fn check_source(field: &str, src: &DataSource) -> Result<()> {
    match (&src.path, &src.benchmark) {
        (Some(_), Some(_)) => Err(Error::Config(format!("{field}: set only one of {field}.path and {field}.benchmark"))),
        (None, None) => Err(Error::Config(format!("{field}: missing {field}.path (or {field}.benchmark)"))),
        (Some(p), None) if !p.is_file() => Err(Error::Config(format!(
            "{field}.path: no such file {}",
            p.display()
        ))),
        (None, Some(b)) => b.validate().map_err(at(&format!("{field}.benchmark"))),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parses `path`; relative data paths and `output_dir` are resolved
    /// against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.output_dir);
        if let Some(p) = self.data.path.as_mut() {
            fix(p);
        }
        if let Some(p) = self.target.as_mut().and_then(|t| t.path.as_mut()) {
            fix(p);
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_source("data", &self.data)?;
        match (&self.target, self.experiment) {
            (Some(t), _) => check_source("target", t)?,
            (None, ExperimentKind::Cross) => {
                return Err(Error::Config("target: required when experiment = \"cross\"".into()))
            }
            _ => {}
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds: list at least one seed".into()));
        }
        self.model.validate()?;
        self.train.validate()?;
        for (name, c) in [
            ("classifiers.real", &self.classifiers.real),
            ("classifiers.synthetic", &self.classifiers.synthetic),
            ("classifiers.real_plus_synthetic", &self.classifiers.real_plus_synthetic),
            ("cross_classifiers.real", &self.cross_classifiers.real),
            ("cross_classifiers.synthetic", &self.cross_classifiers.synthetic),
            ("cross_classifiers.real_plus_synthetic", &self.cross_classifiers.real_plus_synthetic),
            ("encoded.classifier", &self.encoded.classifier),
        ] {
            c.validate().map_err(at(name))?;
        }
        self.encoded.baseline_ae.validate().map_err(at("encoded.baseline_ae"))?;
        self.experiment_config().validate()
    }

    pub fn experiment_config(&self) -> ExperimentConfig {
        ExperimentConfig {
            model: self.model.clone(),
            train: self.train.clone(),
            classifiers: self.classifiers.clone(),
            cross_classifiers: self.cross_classifiers.clone(),
            encoded: self.encoded.clone(),
            synthetic_test: self.synthetic_test,
            dev_fraction: self.dev_fraction,
            seeds: self.seeds.clone(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// First 12 hex digits of SHA-256 over the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serialises");
        hex::encode(Sha256::digest(&json))[..12].to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_is_rejected() {
        let err = RunConfig::from_toml_str("[model]\nlatent = 3\n").unwrap_err();
        assert!(err.to_string().contains("latent"), "{err}");
    }

    #[test]
    fn missing_data_names_field() {
        let err = RunConfig::default().validate().unwrap_err();
        assert!(err.to_string().contains("data.path"), "{err}");
    }

    #[test]
    fn bad_classifier_names_path() {
        let mut cfg = RunConfig::from_toml_str("[data.benchmark]\n[classifiers.synthetic]\nlearning_rate = -1.0\n").unwrap();
        cfg.model.input_dim = 64;
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("classifiers.synthetic"), "{err}");
    }

    #[test]
    fn toml_round_trip_and_hash() {
        let cfg = RunConfig::from_toml_str("seeds = [3]\n[data.benchmark]\nn_per_class = 10\n").unwrap();
        let back = RunConfig::from_toml_str(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.hash(), back.hash());
        assert_eq!(cfg.hash().len(), 12);
    }
}
