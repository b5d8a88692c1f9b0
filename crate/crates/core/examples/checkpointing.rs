//! Saves a trained model with its optimiser state, reloads it and checks the
//! reloaded copy reconstructs identically.
//!
//! cargo run --example checkpointing

use mixgan::checkpoint::{load_checkpoint_for, save_checkpoint, ModelCheckpoint};
use mixgan::data::{make_benchmark, BenchmarkConfig};
use mixgan::model::{MixGanConfig, MixGanModel};
use mixgan::training::{train, TrainConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mixgan::Result<()> {
    let data = make_benchmark(&BenchmarkConfig {
        n_per_class: 20,
        dim: 10,
        ..Default::default()
    })?;
    let cfg = MixGanConfig {
        input_dim: 10,
        encoder_hidden: vec![16, 8],
        discriminator_hidden: vec![16, 16],
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut model = MixGanModel::new(cfg.clone(), &mut rng)?;
    let tc = TrainConfig {
        pretrain_epochs: 5,
        epochs: 5,
        ..Default::default()
    };
    let run = train(&mut model, &data, &tc, &mut rng)?;

    let dir = std::env::temp_dir().join("mixgan-checkpoint-example");
    std::fs::create_dir_all(&dir).map_err(|e| mixgan::Error::io(&dir, e))?;
    let path = dir.join("model.ckpt");
    save_checkpoint(&ModelCheckpoint::new(model.clone(), Some(run.optimizers), 10), &path)?;
    let size = std::fs::metadata(&path).map_err(|e| mixgan::Error::io(&path, e))?.len();
    println!("saved {} parameters in {size} bytes to {}", model.param_count(), path.display());

    let back = load_checkpoint_for(&path, &cfg)?;
    let same = back.model.reconstruct(data.features())? == model.reconstruct(data.features())?;
    println!("epoch {}, optimiser state {}, identical reconstructions: {same}", back.epoch, back.optimizers.is_some());

    let wider = MixGanConfig { latent_dim: 3, ..cfg };
    if let Err(e) = load_checkpoint_for(&path, &wider) {
        println!("loading with a different config fails: {e}");
    }
    Ok(())
}
