//! Trains the adversarial autoencoder on the Gaussian benchmark and prints
//! the per-epoch losses.
//!
//! cargo run --release --example train_mixgan -- [seed] [pretrain_epochs] [epochs] [lr_autoencoder]

use mixgan::data::{fit_normalizer, make_benchmark, BenchmarkConfig, NormKind};
use mixgan::model::{MixGanConfig, MixGanModel};
use mixgan::training::{train, TrainConfig};
use mixgan::ExperimentConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mixgan::Result<()> {
    let arg = |i: usize, d: f64| std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let seed = arg(1, 0.0) as u64;
    let raw = make_benchmark(&BenchmarkConfig::default())?;
    let data = fit_normalizer(&raw, NormKind::MinMax)?.apply(&raw)?;

    let preset = ExperimentConfig::benchmark();
    let model_cfg = MixGanConfig {
        input_dim: data.dim(),
        ..preset.model
    };
    let train_cfg = TrainConfig {
        pretrain_epochs: arg(2, preset.train.pretrain_epochs as f64) as usize,
        epochs: arg(3, preset.train.epochs as f64) as usize,
        lr_autoencoder: arg(4, preset.train.lr_autoencoder),
        seed,
        ..preset.train
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = MixGanModel::new(model_cfg, &mut rng)?;
    let t = std::time::Instant::now();
    let run = train(&mut model, &data, &train_cfg, &mut rng)?;

    let var: f64 = data.features().column_means().iter().enumerate().map(|(j, m)| {
        data.features().row_iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / data.len() as f64
    }).sum::<f64>();
    for r in &run.log.records {
        println!(
            "{:>4} {:<11} recon/var {:.4} gen {:>8} disc {:>8} acc {:>6}",
            r.epoch,
            r.stage.name(),
            r.reconstruction / var,
            r.generator.map_or("-".into(), |v| format!("{v:.4}")),
            r.discriminator.map_or("-".into(), |v| format!("{v:.4}")),
            r.discriminator_accuracy.map_or("-".into(), |v| format!("{v:.3}")),
        );
    }
    let rec = model.reconstruct(data.features())?;
    let err: f64 = rec.as_slice().iter().zip(data.features().as_slice()).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / data.len() as f64;
    println!("eval recon/var {:.4}  {:.1}s", err / var, t.elapsed().as_secs_f64());
    Ok(())
}
