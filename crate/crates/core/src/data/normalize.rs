use serde::{Deserialize, Serialize};

use super::FeatureDataset;
use crate::error::{Error, Result};
use crate::nn::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    MinMax,
    ZScore,
}

/// Frozen per-feature statistics.
///
/// For `MinMax`, `offset` is the minimum and `spread` is `max - min`; for
/// `ZScore` they are the mean and the population standard deviation.
/// Features with zero spread map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub kind: NormKind,
    pub offset: Vec<f64>,
    pub spread: Vec<f64>,
    pub fitted_on: String,
}

pub fn fit_normalizer(data: &FeatureDataset, kind: NormKind) -> Result<NormalizationStats> {
    NormalizationStats::fit(data.features(), kind, data.corpus())
}

impl NormalizationStats {
    pub fn fit(x: &Matrix, kind: NormKind, fitted_on: impl Into<String>) -> Result<Self> {
        if x.rows() == 0 {
            return Err(Error::EmptyDataset);
        }
        if x.rows() < 2 {
            return Err(Error::InvalidArgument(
                "normalisation needs at least two rows".into(),
            ));
        }
        let d = x.cols();
        let (offset, spread) = match kind {
            NormKind::MinMax => {
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for row in x.row_iter() {
                    for j in 0..d {
                        lo[j] = lo[j].min(row[j]);
                        hi[j] = hi[j].max(row[j]);
                    }
                }
                let spread = lo.iter().zip(&hi).map(|(l, h)| h - l).collect();
                (lo, spread)
            }
            NormKind::ZScore => {
                let mean = x.column_means();
                let mut var = vec![0.0; d];
                for row in x.row_iter() {
                    for j in 0..d {
                        let c = row[j] - mean[j];
                        var[j] += c * c;
                    }
                }
                let n = x.rows() as f64;
                (mean, var.into_iter().map(|v| (v / n).sqrt()).collect())
            }
        };
        Ok(Self {
            kind,
            offset,
            spread,
            fitted_on: fitted_on.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        self.check(x)?;
        let mut out = x.clone();
        for r in 0..out.rows() {
            for (j, v) in out.row_mut(r).iter_mut().enumerate() {
                *v = if self.spread[j] > 0.0 {
                    (*v - self.offset[j]) / self.spread[j]
                } else {
                    0.0
                };
            }
        }
        Ok(out)
    }

    /// Inverse of [`transform`](Self::transform); constant features come back
    /// as their fitted offset.
    pub fn inverse(&self, x: &Matrix) -> Result<Matrix> {
        self.check(x)?;
        let mut out = x.clone();
        for r in 0..out.rows() {
            for (j, v) in out.row_mut(r).iter_mut().enumerate() {
                *v = if self.spread[j] > 0.0 {
                    *v * self.spread[j] + self.offset[j]
                } else {
                    self.offset[j]
                };
            }
        }
        Ok(out)
    }

    pub fn apply(&self, data: &FeatureDataset) -> Result<FeatureDataset> {
        data.with_features(self.transform(data.features())?)
    }

    fn check(&self, x: &Matrix) -> Result<()> {
        if x.cols() != self.dim() {
            return Err(Error::shape("normaliser input", self.dim(), x.cols()));
        }
        Ok(())
    }
}
