//! Trains on the benchmark, generates one synthetic row per real row and
//! compares class centroids of the two sets.
//!
//! cargo run --release --example synthetic_features -- [out.csv]

use mixgan::data::{fit_normalizer, make_benchmark, write_feature_csv, BenchmarkConfig, Emotion, NormKind};
use mixgan::model::{MixGanConfig, MixGanModel};
use mixgan::training::{generate_synthetic_dataset, train};
use mixgan::{ExperimentConfig, FeatureDataset};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn centroid(d: &FeatureDataset, e: Emotion) -> Vec<f64> {
    let idx: Vec<usize> = (0..d.len()).filter(|&i| d.labels()[i] == e).collect();
    d.subset(&idx).features().column_means()
}

fn main() -> mixgan::Result<()> {
    let raw = make_benchmark(&BenchmarkConfig::default())?;
    let norm = fit_normalizer(&raw, NormKind::MinMax)?;
    let data = norm.apply(&raw)?;
    let preset = ExperimentConfig::benchmark();
    let cfg = MixGanConfig {
        input_dim: data.dim(),
        ..preset.model
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut model = MixGanModel::new(cfg, &mut rng)?;
    train(&mut model, &data, &preset.train, &mut rng)?;

    let synthetic = generate_synthetic_dataset(&model, &data)?;
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    for e in Emotion::ALL {
        let real = centroid(&data, e);
        let nearest_other = Emotion::ALL
            .iter()
            .filter(|&&o| o != e)
            .map(|&o| dist(&real, &centroid(&data, o)))
            .fold(f64::INFINITY, f64::min);
        println!(
            "{:<8} synthetic-to-real centroid {:.3}   nearest other class {:.3}",
            e.name(),
            dist(&centroid(&synthetic, e), &real),
            nearest_other
        );
    }

    if let Some(path) = std::env::args().nth(1) {
        let back = synthetic.with_features(norm.inverse(synthetic.features())?)?;
        let file = std::fs::File::create(&path).map_err(|e| mixgan::Error::io(&path, e))?;
        write_feature_csv(&back, file)?;
        println!("wrote {} rows to {path}", back.len());
    }
    Ok(())
}
