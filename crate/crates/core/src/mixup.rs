//! Mixup: virtual training examples built as convex combinations of sample
//! pairs and their label vectors.
//!
//! A configurable share of every batch is forced to the endpoints λ ∈ {0, 1},
//! so those rows are genuine training samples. The adversarial trainer feeds
//! only these rows to the discriminator as "real".

use rand::{Rng, RngCore};
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::data::FeatureDataset;
use crate::error::{Error, Result};
use crate::nn::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixupConfig {
    /// Shape of the symmetric Beta(α, α) mixing distribution.
    pub alpha: f64,
    /// Probability that a row is left unmixed (λ drawn from {0, 1}).
    pub real_fraction: f64,
    /// Offsets the stream that draws training batches.
    pub seed: u64,
}

impl Default for MixupConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            real_fraction: 0.5,
            seed: 0,
        }
    }
}

impl MixupConfig {
    /// Every row is an untouched training sample.
    pub fn disabled() -> Self {
        Self {
            real_fraction: 1.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!("mixup.alpha must be positive, got {}", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.real_fraction) {
            return Err(Error::Config(format!(
                "mixup.real_fraction must lie in [0, 1], got {}",
                self.real_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedBatch {
    pub x_tilde: Matrix,
    pub y_tilde: Matrix,
    pub lambda: Vec<f64>,
    /// `true` iff the row's λ is exactly 0 or 1.
    pub is_real: Vec<bool>,
    /// `(i, j)` dataset rows the mixture was built from.
    pub source_indices: Vec<(usize, usize)>,
}

impl MixedBatch {
    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn real_rows(&self) -> Vec<usize> {
        (0..self.len()).filter(|&r| self.is_real[r]).collect()
    }

    /// The batch as a dataset with soft targets; the hard label of each row is
    /// the argmax of its mixed target (ties go to the lower class index) and
    /// metadata is taken from the first source row.
    pub fn to_dataset(&self, source: &FeatureDataset) -> Result<FeatureDataset> {
        let first: Vec<usize> = self.source_indices.iter().map(|&(i, _)| i).collect();
        let meta = source.subset(&first);
        let labels = self
            .y_tilde
            .row_iter()
            .map(|row| {
                let mut best = 0;
                for (c, &v) in row.iter().enumerate() {
                    if v > row[best] {
                        best = c;
                    }
                }
                crate::data::Emotion::from_index(best).expect("four classes")
            })
            .collect();
        FeatureDataset::with_targets(
            source.corpus(),
            (0..self.len()).map(|r| format!("mix{r:06}")).collect(),
            self.x_tilde.clone(),
            labels,
            self.y_tilde.clone(),
            meta.sessions().to_vec(),
            meta.speakers().to_vec(),
        )
    }
}

/// `x̃ = λ·x_i + (1−λ)·x_j`, `ỹ = λ·y_i + (1−λ)·y_j`. The endpoints return the
/// corresponding input unchanged.
pub fn mix_pair(
    x_i: &[f64],
    y_i: &[f64],
    x_j: &[f64],
    y_j: &[f64],
    lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if x_i.len() != x_j.len() {
        return Err(Error::shape("mix_pair features", x_i.len(), x_j.len()));
    }
    if y_i.len() != y_j.len() {
        return Err(Error::shape("mix_pair labels", y_i.len(), y_j.len()));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!("lambda {lambda} outside [0, 1]")));
    }
    if lambda == 1.0 {
        return Ok((x_i.to_vec(), y_i.to_vec()));
    }
    if lambda == 0.0 {
        return Ok((x_j.to_vec(), y_j.to_vec()));
    }
    let mix = |a: &[f64], b: &[f64]| -> Vec<f64> {
        a.iter()
            .zip(b)
            .map(|(p, q)| lambda * p + (1.0 - lambda) * q)
            .collect()
    };
    Ok((mix(x_i, x_j), mix(y_i, y_j)))
}

/// With probability `real_fraction` returns exactly 0.0 or 1.0 (even odds);
/// otherwise a Beta(α, α) draw.
pub fn sample_lambda<R: Rng + ?Sized>(config: &MixupConfig, rng: &mut R) -> f64 {
    if rng.random::<f64>() < config.real_fraction {
        return if rng.random::<bool>() { 1.0 } else { 0.0 };
    }
    let beta = Beta::new(config.alpha, config.alpha).expect("validated alpha");
    beta.sample(rng)
}

/// `batch_size` rows, each mixing two uniformly drawn dataset rows with an
/// independent λ.
pub fn make_mixed_batch(
    dataset: &FeatureDataset,
    batch_size: usize,
    config: &MixupConfig,
    rng: &mut dyn RngCore,
) -> Result<MixedBatch> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    config.validate()?;
    let n = dataset.len();
    let x = dataset.features();
    let y = dataset.targets();
    let mut x_rows = Vec::with_capacity(batch_size * x.cols());
    let mut y_rows = Vec::with_capacity(batch_size * y.cols());
    let mut lambda = Vec::with_capacity(batch_size);
    let mut is_real = Vec::with_capacity(batch_size);
    let mut source_indices = Vec::with_capacity(batch_size);
    for _ in 0..batch_size {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        let l = sample_lambda(config, rng);
        let (xm, ym) = mix_pair(x.row(i), y.row(i), x.row(j), y.row(j), l)?;
        x_rows.extend_from_slice(&xm);
        y_rows.extend_from_slice(&ym);
        is_real.push(l == 0.0 || l == 1.0);
        lambda.push(l);
        source_indices.push((i, j));
    }
    Ok(MixedBatch {
        x_tilde: Matrix::from_vec(batch_size, x.cols(), x_rows)?,
        y_tilde: Matrix::from_vec(batch_size, y.cols(), y_rows)?,
        lambda,
        is_real,
        source_indices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_benchmark, BenchmarkConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn endpoints_and_midpoint() {
        let (xi, yi, xj, yj) = ([4.0, 0.0], [1.0, 0.0], [0.0, 4.0], [0.0, 1.0]);
        assert_eq!(mix_pair(&xi, &yi, &xj, &yj, 1.0).unwrap(), (xi.to_vec(), yi.to_vec()));
        assert_eq!(mix_pair(&xi, &yi, &xj, &yj, 0.0).unwrap(), (xj.to_vec(), yj.to_vec()));
        let (x, y) = mix_pair(&xi, &yi, &xj, &yj, 0.25).unwrap();
        assert_eq!(x, vec![1.0, 3.0]);
        assert_eq!(y, vec![0.25, 0.75]);
    }

    #[test]
    fn endpoint_preserves_negative_zero() {
        let (x, _) = mix_pair(&[-0.0], &[1.0], &[-3.0], &[1.0], 1.0).unwrap();
        assert_eq!(x[0].to_bits(), (-0.0f64).to_bits());
    }

    #[test]
    fn mix_pair_errors() {
        assert!(mix_pair(&[1.0], &[1.0], &[1.0, 2.0], &[1.0], 0.5).is_err());
        assert!(mix_pair(&[1.0], &[1.0], &[1.0], &[1.0, 0.0], 0.5).is_err());
        assert!(mix_pair(&[1.0], &[1.0], &[1.0], &[1.0], 1.5).is_err());
    }

    #[test]
    fn real_fraction_one_gives_endpoints() {
        let cfg = MixupConfig::disabled();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            let l = sample_lambda(&cfg, &mut rng);
            assert!(l == 0.0 || l == 1.0);
        }
    }

    #[test]
    fn beta_draws_are_symmetric() {
        let cfg = MixupConfig {
            alpha: 0.4,
            real_fraction: 0.0,
            seed: 0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 100_000;
        let mean = (0..n).map(|_| sample_lambda(&cfg, &mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn batch_rows_recompute() {
        let data = make_benchmark(&BenchmarkConfig {
            n_per_class: 10,
            dim: 5,
            ..Default::default()
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = make_mixed_batch(&data, 64, &MixupConfig::default(), &mut rng).unwrap();
        assert_eq!(b.len(), 64);
        for r in 0..b.len() {
            let (i, j) = b.source_indices[r];
            let l = b.lambda[r];
            assert!((0.0..=1.0).contains(&l));
            assert_eq!(b.is_real[r], l == 0.0 || l == 1.0);
            for c in 0..data.dim() {
                let expect = l * data.features().get(i, c) + (1.0 - l) * data.features().get(j, c);
                assert!((b.x_tilde.get(r, c) - expect).abs() < 1e-12);
            }
            assert!((b.y_tilde.row(r).iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        let ds = b.to_dataset(&data).unwrap();
        assert_eq!(ds.len(), 64);
    }

    #[test]
    fn empty_dataset_rejected() {
        let data = make_benchmark(&BenchmarkConfig {
            n_per_class: 1,
            dim: 2,
            ..Default::default()
        })
        .unwrap()
        .subset(&[]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            make_mixed_batch(&data, 4, &MixupConfig::default(), &mut rng),
            Err(Error::EmptyDataset)
        ));
    }
}
