//! Train on one benchmark corpus, test on another that shares the class
//! structure but has its own corpus and session offsets. Classifier epochs
//! are picked on a 30 % stratified dev split of the target.
//!
//! cargo run --release --example cross_corpus -- [n_seeds]

use mixgan::data::{make_benchmark, BenchmarkConfig};
use mixgan::eval::{run_cross_corpus, ExperimentConfig};

fn main() -> mixgan::Result<()> {
    let n_seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let source = make_benchmark(&BenchmarkConfig {
        corpus: "source".into(),
        ..BenchmarkConfig::default()
    })?;
    let target = make_benchmark(&BenchmarkConfig {
        corpus: "target".into(),
        session_shift: 0.15,
        corpus_shift: 0.1,
        ..BenchmarkConfig::default()
    })?;
    let cfg = ExperimentConfig {
        seeds: (1..=n_seeds).collect(),
        ..ExperimentConfig::benchmark()
    };
    let start = std::time::Instant::now();
    let report = run_cross_corpus(&source, &target, &cfg)?;
    print!("{}", report.summary());
    println!("{:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}
