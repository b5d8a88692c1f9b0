//! Generates two benchmark corpora, writes one as a feature CSV and prints
//! class and session counts plus leave-one-session-out fold sizes.
//!
//! cargo run --example benchmark_data -- [out.csv]

use mixgan::data::{loso_splits, make_benchmark, read_feature_csv, write_feature_csv, BenchmarkConfig, Emotion};

fn main() -> mixgan::Result<()> {
    let source = make_benchmark(&BenchmarkConfig::default())?;
    let target = make_benchmark(&BenchmarkConfig {
        corpus: "target".into(),
        session_shift: 0.15,
        corpus_shift: 0.1,
        ..Default::default()
    })?;
    for d in [&source, &target] {
        let counts: Vec<String> = Emotion::ALL
            .iter()
            .map(|e| format!("{} {}", e.name(), d.class_counts()[e.index()]))
            .collect();
        println!("{}: {} rows x {} features; {}", d.corpus(), d.len(), d.dim(), counts.join(", "));
        for f in loso_splits(d)? {
            println!("  fold {:<6} train {:>4} test {:>4}", f.session, f.train.len(), f.test.len());
        }
    }

    let mut buf = Vec::new();
    write_feature_csv(&source, &mut buf)?;
    let back = read_feature_csv(buf.as_slice())?;
    assert_eq!(back.features(), source.features());
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, &buf).map_err(|e| mixgan::Error::io(&path, e))?;
        println!("wrote {path}");
    }
    Ok(())
}
