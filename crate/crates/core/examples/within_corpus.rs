//! Leave-one-session-out evaluation on the benchmark: classifiers trained on
//! real, synthetic and real+synthetic features.
//!
//! cargo run --release --example within_corpus -- [n_seeds]

use mixgan::data::{make_benchmark, BenchmarkConfig};
use mixgan::eval::{run_within_corpus, ExperimentConfig};

fn main() -> mixgan::Result<()> {
    let n_seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let data = make_benchmark(&BenchmarkConfig::default())?;
    let cfg = ExperimentConfig {
        seeds: (1..=n_seeds).collect(),
        ..ExperimentConfig::benchmark()
    };
    let start = std::time::Instant::now();
    let report = run_within_corpus(&data, &cfg)?;
    print!("{}", report.summary());
    report.write_confusion_csv(std::io::stdout()).expect("stdout");
    println!("{:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}
