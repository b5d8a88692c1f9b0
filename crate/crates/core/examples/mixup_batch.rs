//! Draws one mixup batch and shows which rows stay real.
//!
//! cargo run --example mixup_batch -- [real_fraction] [alpha]

use mixgan::data::{make_benchmark, BenchmarkConfig};
use mixgan::mixup::{make_mixed_batch, MixupConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mixgan::Result<()> {
    let arg = |i: usize, d: f64| std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let cfg = MixupConfig {
        real_fraction: arg(1, 0.5),
        alpha: arg(2, 1.0),
        ..Default::default()
    };
    let data = make_benchmark(&BenchmarkConfig {
        n_per_class: 20,
        dim: 4,
        ..Default::default()
    })?;
    let batch = make_mixed_batch(&data, 12, &cfg, &mut ChaCha8Rng::seed_from_u64(1))?;

    println!("row  lambda  real  sources      target (angry happy neutral sad)");
    for r in 0..batch.len() {
        let (i, j) = batch.source_indices[r];
        let y: Vec<String> = batch.y_tilde.row(r).iter().map(|v| format!("{v:.2}")).collect();
        println!(
            "{r:>3}  {:.4}  {:<5} {i:>3} x {j:<3}   {}",
            batch.lambda[r],
            batch.is_real[r],
            y.join(" ")
        );
    }
    println!("{} of {} rows go to the discriminator", batch.real_rows().len(), batch.len());
    Ok(())
}
