//! Two-dimensional codes from the adversarial encoder, PCA and a plain
//! autoencoder, each with and without mixup, scored by a small classifier.
//!
//! cargo run --release --example encoded_comparison -- [n_seeds]

use mixgan::data::{make_benchmark, BenchmarkConfig};
use mixgan::eval::{run_encoded, ExperimentConfig};

fn main() -> mixgan::Result<()> {
    let n_seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let data = make_benchmark(&BenchmarkConfig::default())?;
    let cfg = ExperimentConfig {
        seeds: (1..=n_seeds).collect(),
        ..ExperimentConfig::benchmark()
    };
    let start = std::time::Instant::now();
    let report = run_encoded(&data, &cfg)?;
    print!("{}", report.summary());
    println!("{:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}
