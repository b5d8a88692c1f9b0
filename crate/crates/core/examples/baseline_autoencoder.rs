//! Trains the plain autoencoder baseline with and without mixup and compares
//! its reconstruction error with PCA at the same code width.
//!
//! cargo run --release --example baseline_autoencoder -- [k]

use mixgan::baselines::{baseline_ae_train, pca_fit};
use mixgan::data::{fit_normalizer, make_benchmark, BenchmarkConfig, NormKind};
use mixgan::mixup::MixupConfig;
use mixgan::ExperimentConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mixgan::Result<()> {
    let k = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let raw = make_benchmark(&BenchmarkConfig::default())?;
    let data = fit_normalizer(&raw, NormKind::MinMax)?.apply(&raw)?;
    let cfg = ExperimentConfig::benchmark().encoded.baseline_ae;

    let pca = pca_fit(data.features(), k)?.reconstruction_error(data.features())?;
    println!("pca               k={k} mse {pca:.6}");
    for (name, mixup) in [("autoencoder", MixupConfig::disabled()), ("autoencoder+mixup", MixupConfig::default())] {
        let ae = baseline_ae_train(&data, k, &cfg, &mixup, &mut ChaCha8Rng::seed_from_u64(0))?;
        println!("{name:<17} k={k} mse {:.6}", ae.reconstruction_error(data.features())?);
    }
    Ok(())
}
