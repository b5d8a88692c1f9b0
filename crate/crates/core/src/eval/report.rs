use std::io::Write;

use serde::{Deserialize, Serialize};

use super::metrics::{mean_std, ConfusionMatrix};
use crate::data::Emotion;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Within,
    Encoded,
    Cross,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Within => "within",
            ExperimentKind::Encoded => "encoded",
            ExperimentKind::Cross => "cross",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSource {
    Real,
    Synthetic,
    RealPlusSynthetic,
    Encoded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: String,
    pub uar: f64,
    /// Test rows per class, in class order.
    pub support: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    /// Mean of the fold UARs.
    pub uar: f64,
    pub folds: Vec<FoldResult>,
}

/// Results for one classifier setting across seeds and folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub setting: String,
    pub feature_source: FeatureSource,
    pub seeds: Vec<SeedResult>,
    pub mean_uar: f64,
    /// Population standard deviation of the per-seed UARs.
    pub std_uar: f64,
    /// Summed over every seed and fold.
    pub confusion: ConfusionMatrix,
    pub warnings: Vec<String>,
    /// Published full-scale figure for the same setting, for side-by-side reading.
    pub reference: Option<String>,
}

impl EvalReport {
    pub fn from_seeds(
        setting: impl Into<String>,
        feature_source: FeatureSource,
        mut seeds: Vec<SeedResult>,
        confusion: ConfusionMatrix,
        warnings: Vec<String>,
        reference: Option<String>,
    ) -> Self {
        seeds.sort_by_key(|s| s.seed);
        let per_seed: Vec<f64> = seeds.iter().map(|s| s.uar).collect();
        let (mean_uar, std_uar) = mean_std(&per_seed);
        Self {
            setting: setting.into(),
            feature_source,
            seeds,
            mean_uar,
            std_uar,
            confusion,
            warnings,
            reference,
        }
    }

    pub fn fold_count(&self) -> usize {
        self.seeds.iter().map(|s| s.folds.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentKind,
    pub corpus: String,
    pub settings: Vec<EvalReport>,
}

impl ExperimentReport {
    pub fn setting(&self, name: &str) -> Option<&EvalReport> {
        self.settings.iter().find(|s| s.setting == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One row per (setting, seed, fold).
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| Error::Data(format!("writing report csv: {e}"));
        out.write_record(["experiment", "setting", "feature_source", "seed", "fold", "uar"])
            .map_err(csv_err)?;
        for s in &self.settings {
            let source = serde_json::to_value(s.feature_source)?;
            let source = source.as_str().unwrap_or_default().to_string();
            for seed in &s.seeds {
                for f in &seed.folds {
                    out.write_record([
                        self.experiment.name(),
                        &s.setting,
                        &source,
                        &seed.seed.to_string(),
                        &f.fold,
                        &f.uar.to_string(),
                    ])
                    .map_err(csv_err)?;
                }
            }
        }
        out.flush().map_err(|e| Error::Data(format!("writing report csv: {e}")))?;
        Ok(())
    }

    /// A `# setting` line followed by a header and one row per true class,
    /// blocks separated by a blank line.
    pub fn write_confusion_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let names: Vec<&str> = Emotion::ALL.iter().map(|e| e.name()).collect();
        for (i, s) in self.settings.iter().enumerate() {
            if i > 0 {
                writeln!(w)?;
            }
            writeln!(w, "# {}", s.setting)?;
            writeln!(w, "true\\predicted,{}", names.join(","))?;
            for (name, row) in names.iter().zip(&s.confusion.counts) {
                let cells: Vec<String> = row.iter().map(u64::to_string).collect();
                writeln!(w, "{name},{}", cells.join(","))?;
            }
        }
        Ok(())
    }

    /// Plain-text table of mean ± std per setting.
    pub fn summary(&self) -> String {
        let mut s = format!("{} ({})\n", self.experiment.name(), self.corpus);
        for r in &self.settings {
            s.push_str(&format!(
                "  {:<22} UAR {:.4} ± {:.4}  [{} folds]",
                r.setting,
                r.mean_uar,
                r.std_uar,
                r.fold_count()
            ));
            if let Some(reference) = &r.reference {
                s.push_str(&format!("  ({reference})"));
            }
            s.push('\n');
            for w in &r.warnings {
                s.push_str(&format!("    warning: {w}\n"));
            }
        }
        s
    }
}

/// Published full-scale UAR (%) for a setting, where one exists.
pub fn reference_annotation(experiment: ExperimentKind, setting: &str) -> Option<String> {
    let value = match (experiment, setting) {
        (ExperimentKind::Within, "real") => "60.51 ± 0.57",
        (ExperimentKind::Within, "synthetic") => "45.75 ± 0.81",
        (ExperimentKind::Within, "real+synthetic") => "61.05 ± 0.68",
        (ExperimentKind::Encoded, "pca") => "57.7",
        (ExperimentKind::Encoded, "autoencoder") => "57.8",
        (ExperimentKind::Encoded, "pca+mixup") => "58.3",
        (ExperimentKind::Encoded, "autoencoder+mixup") => "58.5",
        (ExperimentKind::Encoded, "proposed+mixup") => "59.6",
        (ExperimentKind::Cross, "real") => "46.0 ± 0.57",
        (ExperimentKind::Cross, "synthetic") => "42.15 ± 1.12",
        (ExperimentKind::Cross, "real+synthetic") => "46.60 ± 0.45",
        _ => return None,
    };
    Some(format!("published full-scale UAR {value} %"))
}
