//! Feature datasets: ingestion, normalisation, fold construction and a
//! synthetic benchmark that stands in for licensed emotion corpora.

mod benchmark;
mod csv_io;
mod normalize;
mod split;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use benchmark::{make_benchmark, BenchmarkConfig};
pub use csv_io::{feature_column_name, load_feature_csv, read_feature_csv, write_feature_csv, CsvError};
pub use normalize::{fit_normalizer, NormKind, NormalizationStats};
pub use split::{loso_splits, stratified_split, Fold};

use crate::error::{Error, Result};
use crate::nn::Matrix;

pub const NUM_CLASSES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emotion {
    Angry,
    Happy,
    Neutral,
    Sad,
}

impl Emotion {
    /// Fixed class order used for indices, one-hot vectors and report tables.
    pub const ALL: [Emotion; NUM_CLASSES] =
        [Emotion::Angry, Emotion::Happy, Emotion::Neutral, Emotion::Sad];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Emotion::Angry => "angry",
            Emotion::Happy => "happy",
            Emotion::Neutral => "neutral",
            Emotion::Sad => "sad",
        }
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Emotion {
    type Err = String;

    /// Excitement is folded into happy.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "angry" => Ok(Emotion::Angry),
            "happy" | "excitement" => Ok(Emotion::Happy),
            "neutral" => Ok(Emotion::Neutral),
            "sad" => Ok(Emotion::Sad),
            other => Err(other.to_string()),
        }
    }
}

/// `N` feature vectors with per-row label, session and speaker metadata.
///
/// `targets` holds one label distribution per row: one-hot for real data,
/// mixed vectors for mixup output. `labels` is always the hard class (the
/// argmax for soft rows).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDataset {
    ids: Vec<String>,
    features: Matrix,
    labels: Vec<Emotion>,
    targets: Matrix,
    sessions: Vec<String>,
    speakers: Vec<String>,
    corpus: String,
}

impl FeatureDataset {
    pub fn new(
        corpus: impl Into<String>,
        ids: Vec<String>,
        features: Matrix,
        labels: Vec<Emotion>,
        sessions: Vec<String>,
        speakers: Vec<String>,
    ) -> Result<Self> {
        let mut targets = Matrix::zeros(labels.len(), NUM_CLASSES);
        for (r, l) in labels.iter().enumerate() {
            targets.set(r, l.index(), 1.0);
        }
        Self::with_targets(corpus, ids, features, labels, targets, sessions, speakers)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn with_targets(
        corpus: impl Into<String>,
        ids: Vec<String>,
        features: Matrix,
        labels: Vec<Emotion>,
        targets: Matrix,
        sessions: Vec<String>,
        speakers: Vec<String>,
    ) -> Result<Self> {
        let n = features.rows();
        for (what, len) in [
            ("ids", ids.len()),
            ("labels", labels.len()),
            ("targets", targets.rows()),
            ("sessions", sessions.len()),
            ("speakers", speakers.len()),
        ] {
            if len != n {
                return Err(Error::shape(format!("FeatureDataset {what}"), n, len));
            }
        }
        if targets.cols() != NUM_CLASSES {
            return Err(Error::shape("FeatureDataset targets cols", NUM_CLASSES, targets.cols()));
        }
        for (r, row) in targets.row_iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 || row.iter().any(|&v| v < 0.0) {
                return Err(Error::Data(format!("target row {r} is not a distribution")));
            }
        }
        if !features.is_finite() {
            return Err(Error::Data("features contain non-finite values".into()));
        }
        Ok(Self {
            ids,
            features,
            labels,
            targets,
            sessions,
            speakers,
            corpus: corpus.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[Emotion] {
        &self.labels
    }

    pub fn label_indices(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l.index()).collect()
    }

    pub fn targets(&self) -> &Matrix {
        &self.targets
    }

    pub fn sessions(&self) -> &[String] {
        &self.sessions
    }

    pub fn speakers(&self) -> &[String] {
        &self.speakers
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn corpus(&self) -> &str {
        &self.corpus
    }

    pub fn class_counts(&self) -> [usize; NUM_CLASSES] {
        let mut counts = [0; NUM_CLASSES];
        for l in &self.labels {
            counts[l.index()] += 1;
        }
        counts
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        let pick = |v: &[String]| indices.iter().map(|&i| v[i].clone()).collect();
        Self {
            ids: pick(&self.ids),
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            targets: self.targets.select_rows(indices),
            sessions: pick(&self.sessions),
            speakers: pick(&self.speakers),
            corpus: self.corpus.clone(),
        }
    }

    /// Same rows and metadata with a new feature matrix (any width).
    pub fn with_features(&self, features: Matrix) -> Result<Self> {
        if features.rows() != self.len() {
            return Err(Error::shape("FeatureDataset::with_features rows", self.len(), features.rows()));
        }
        if !features.is_finite() {
            return Err(Error::Data("features contain non-finite values".into()));
        }
        Ok(Self {
            features,
            ..self.clone()
        })
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn concat(&self, other: &FeatureDataset) -> Result<Self> {
        let join = |a: &[String], b: &[String]| a.iter().chain(b).cloned().collect();
        Ok(Self {
            ids: join(&self.ids, &other.ids),
            features: self.features.vstack(&other.features)?,
            labels: self.labels.iter().chain(&other.labels).copied().collect(),
            targets: self.targets.vstack(&other.targets)?,
            sessions: join(&self.sessions, &other.sessions),
            speakers: join(&self.speakers, &other.speakers),
            corpus: self.corpus.clone(),
        })
    }

    pub fn with_corpus(mut self, corpus: impl Into<String>) -> Self {
        self.corpus = corpus.into();
        self
    }

    /// Distinct sessions in sorted order.
    pub fn session_names(&self) -> Vec<String> {
        let mut s: Vec<String> = self.sessions.clone();
        s.sort();
        s.dedup();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn excitement_is_happy() {
        assert_eq!("excitement".parse::<Emotion>().unwrap(), Emotion::Happy);
        assert_eq!("Sad".parse::<Emotion>().unwrap(), Emotion::Sad);
        assert!("bored".parse::<Emotion>().is_err());
    }

    #[test]
    fn inconsistent_lengths_rejected() {
        let err = FeatureDataset::new(
            "c",
            vec!["a".into()],
            Matrix::zeros(2, 3),
            vec![Emotion::Sad; 2],
            vec!["s".into(); 2],
            vec!["p".into(); 2],
        );
        assert!(err.is_err());
    }

    #[test]
    fn one_hot_targets() {
        let d = FeatureDataset::new(
            "c",
            vec!["a".into(), "b".into()],
            Matrix::zeros(2, 3),
            vec![Emotion::Neutral, Emotion::Angry],
            vec!["s".into(); 2],
            vec!["p".into(); 2],
        )
        .unwrap();
        assert_eq!(d.targets().row(0), &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(d.targets().row(1), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(d.class_counts(), [1, 0, 1, 0]);
    }
}
