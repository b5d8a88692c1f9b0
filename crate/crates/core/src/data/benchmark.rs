//! Gaussian-cluster benchmark shaped like an acted-emotion corpus: four
//! classes, several recording sessions with two speakers each, and a mild
//! per-session offset.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Emotion, FeatureDataset, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::nn::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub n_per_class: usize,
    pub dim: usize,
    pub n_sessions: usize,
    /// Minimum pairwise distance between class means.
    pub class_separation: f64,
    /// Per-feature standard deviation of within-class noise.
    pub noise_std: f64,
    /// Per-feature standard deviation of each session's mean offset.
    pub session_shift: f64,
    /// Per-feature standard deviation of a corpus-wide offset.
    pub corpus_shift: f64,
    pub corpus: String,
    /// Class means depend on `seed` only; sessions, noise and the corpus
    /// offset also depend on `corpus`, so two corpora sharing a seed share
    /// their emotion structure.
    pub seed: u64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            n_per_class: 200,
            dim: 64,
            n_sessions: 5,
            class_separation: 4.0,
            noise_std: 0.1,
            session_shift: 0.05,
            corpus_shift: 0.0,
            corpus: "benchmark".into(),
            seed: 0,
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_per_class == 0 || self.dim == 0 || self.n_sessions == 0 {
            return Err(Error::Config(
                "benchmark counts (n_per_class, dim, n_sessions) must be positive".into(),
            ));
        }
        for (name, v) in [
            ("class_separation", self.class_separation),
            ("noise_std", self.noise_std),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("benchmark.{name} must be positive")));
            }
        }
        for (name, v) in [
            ("session_shift", self.session_shift),
            ("corpus_shift", self.corpus_shift),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("benchmark.{name} must be non-negative")));
            }
        }
        Ok(())
    }
}

/// Class means whose closest pair sits exactly `separation` apart.
fn class_means(dim: usize, separation: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut means: Vec<Vec<f64>> = (0..NUM_CLASSES)
        .map(|_| (0..dim).map(|_| gauss(rng)).collect())
        .collect();
    let mut min_dist = f64::INFINITY;
    for a in 0..NUM_CLASSES {
        for b in a + 1..NUM_CLASSES {
            let d = means[a]
                .iter()
                .zip(&means[b])
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            min_dist = min_dist.min(d);
        }
    }
    let scale = separation / min_dist;
    for m in &mut means {
        m.iter_mut().for_each(|v| *v *= scale);
    }
    means
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn corpus_seed(seed: u64, corpus: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(corpus.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

pub fn make_benchmark(config: &BenchmarkConfig) -> Result<FeatureDataset> {
    config.validate()?;
    let dim = config.dim;
    let mut class_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let means = class_means(dim, config.class_separation, &mut class_rng);

    let mut rng = ChaCha8Rng::seed_from_u64(corpus_seed(config.seed, &config.corpus));
    let corpus_offset: Vec<f64> = (0..dim)
        .map(|_| config.corpus_shift * gauss(&mut rng))
        .collect();
    let session_offsets: Vec<Vec<f64>> = (0..config.n_sessions)
        .map(|_| {
            (0..dim)
                .map(|_| config.session_shift * gauss(&mut rng))
                .collect()
        })
        .collect();
    let noise = Normal::new(0.0, config.noise_std).expect("validated std");

    let n = config.n_per_class * NUM_CLASSES;
    let mut values = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    let mut ids = Vec::with_capacity(n);
    let mut sessions = Vec::with_capacity(n);
    let mut speakers = Vec::with_capacity(n);
    for (c, mean) in means.iter().enumerate() {
        for k in 0..config.n_per_class {
            let row = c * config.n_per_class + k;
            let s = row % config.n_sessions;
            let session = format!("Ses{:02}", s + 1);
            let gender = if (row / config.n_sessions).is_multiple_of(2) { 'F' } else { 'M' };
            for j in 0..dim {
                values.push(mean[j] + corpus_offset[j] + session_offsets[s][j] + noise.sample(&mut rng));
            }
            ids.push(format!("{}_{row:05}", config.corpus));
            speakers.push(format!("{session}_{gender}"));
            sessions.push(session);
            labels.push(Emotion::ALL[c]);
        }
    }
    FeatureDataset::new(
        config.corpus.clone(),
        ids,
        Matrix::from_vec(n, dim, values)?,
        labels,
        sessions,
        speakers,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_determinism() {
        let cfg = BenchmarkConfig {
            n_per_class: 50,
            dim: 8,
            ..Default::default()
        };
        let a = make_benchmark(&cfg).unwrap();
        assert_eq!(a.len(), 200);
        assert_eq!(a.class_counts(), [50; 4]);
        assert_eq!(a.session_names().len(), 5);
        assert_eq!(a, make_benchmark(&cfg).unwrap());
    }

    #[test]
    fn means_respect_separation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = class_means(16, 3.0, &mut rng);
        for a in 0..4 {
            for b in a + 1..4 {
                let d: f64 = m[a].iter().zip(&m[b]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                assert!(d >= 3.0 - 1e-9);
            }
        }
    }

    #[test]
    fn corpora_share_class_means() {
        let base = BenchmarkConfig {
            n_per_class: 30,
            dim: 6,
            noise_std: 1e-6,
            session_shift: 0.0,
            ..Default::default()
        };
        let other = BenchmarkConfig {
            corpus: "other".into(),
            ..base.clone()
        };
        let a = make_benchmark(&base).unwrap();
        let b = make_benchmark(&other).unwrap();
        for (x, y) in a.features().row(0).iter().zip(b.features().row(0)) {
            assert!((x - y).abs() < 1e-4);
        }
        assert_ne!(a.features(), b.features());
    }
}
