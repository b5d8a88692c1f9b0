//! Fits PCA on the benchmark and prints explained variance and
//! reconstruction error for growing k.
//!
//! cargo run --example pca_projection

use mixgan::baselines::pca_fit;
use mixgan::data::{fit_normalizer, make_benchmark, BenchmarkConfig, NormKind};

fn main() -> mixgan::Result<()> {
    let raw = make_benchmark(&BenchmarkConfig::default())?;
    let data = fit_normalizer(&raw, NormKind::MinMax)?.apply(&raw)?;
    let full = pca_fit(data.features(), data.dim())?;
    let total: f64 = full.explained_variance.iter().sum();
    println!("  k  explained  recon mse");
    for k in [1, 2, 3, 5, 10, 25] {
        let p = pca_fit(data.features(), k)?;
        let share = p.explained_variance.iter().sum::<f64>() / total;
        println!("{k:>3}  {share:>9.4}  {:.6}", p.reconstruction_error(data.features())?);
    }
    let p = pca_fit(data.features(), 2)?;
    let codes = p.transform(data.features())?;
    println!("first rows in 2-d:");
    for r in 0..4 {
        println!("  {:<8} {:>8.4} {:>8.4}", data.labels()[r].name(), codes.get(r, 0), codes.get(r, 1));
    }
    Ok(())
}
