//! Trains the downstream classifier on four sessions, scores the fifth and
//! prints the confusion matrix with per-class recall and UAR.
//!
//! cargo run --release --example classifier_uar

use mixgan::data::{fit_normalizer, loso_splits, make_benchmark, BenchmarkConfig, Emotion, NormKind};
use mixgan::eval::{train_classifier, uar, ClassifierConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mixgan::Result<()> {
    let data = make_benchmark(&BenchmarkConfig {
        class_separation: 1.0,
        noise_std: 0.3,
        ..Default::default()
    })?;
    let fold = &loso_splits(&data)?[0];
    let norm = fit_normalizer(&fold.train, NormKind::MinMax)?;
    let (train, test) = (norm.apply(&fold.train)?, norm.apply(&fold.test)?);
    let cfg = ClassifierConfig {
        hidden_units: 32,
        learning_rate: 1e-3,
        epochs: 40,
        ..ClassifierConfig::real_only()
    };
    let fit = train_classifier(&train, &cfg, &mut ChaCha8Rng::seed_from_u64(0))?;
    println!(
        "loss epoch 1 {:.4} -> epoch {} {:.4}",
        fit.epoch_losses[0],
        fit.epoch_losses.len(),
        fit.epoch_losses.last().copied().unwrap_or(f64::NAN)
    );

    let cm = fit.classifier.confusion(&test)?;
    print!("{:<8}", "");
    for e in Emotion::ALL {
        print!("{:>8}", e.name());
    }
    println!("  recall");
    for (e, recall) in Emotion::ALL.iter().zip(cm.recalls()) {
        print!("{:<8}", e.name());
        for c in &cm.counts[e.index()] {
            print!("{c:>8}");
        }
        println!("  {}", recall.map_or("-".into(), |r| format!("{r:.3}")));
    }
    println!("UAR {:.4} on session {}", uar(&cm)?, fold.session);
    Ok(())
}
