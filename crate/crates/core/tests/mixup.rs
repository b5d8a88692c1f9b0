use mixgan::data::{make_benchmark, BenchmarkConfig};
use mixgan::mixup::{make_mixed_batch, mix_pair, MixupConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small() -> mixgan::FeatureDataset {
    make_benchmark(&BenchmarkConfig {
        n_per_class: 12,
        dim: 6,
        ..Default::default()
    })
    .unwrap()
}

proptest! {
    #[test]
    fn mixture_lies_between_endpoints(
        xi in prop::collection::vec(-10.0f64..10.0, 5),
        xj in prop::collection::vec(-10.0f64..10.0, 5),
        l in 0.0f64..=1.0,
    ) {
        let yi = [1.0, 0.0, 0.0, 0.0];
        let yj = [0.0, 0.0, 1.0, 0.0];
        let (x, y) = mix_pair(&xi, &yi, &xj, &yj, l).unwrap();
        for k in 0..5 {
            let (lo, hi) = (xi[k].min(xj[k]), xi[k].max(xj[k]));
            prop_assert!(x[k] >= lo - 1e-12 && x[k] <= hi + 1e-12);
        }
        prop_assert!((y.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((y[0] - l).abs() < 1e-15);
    }

    #[test]
    fn batch_rows_are_consistent(seed in any::<u64>(), alpha in 0.1f64..4.0, real in 0.0f64..=1.0) {
        let data = small();
        let cfg = MixupConfig { alpha, real_fraction: real, seed: 0 };
        let b = make_mixed_batch(&data, 32, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(b.len(), 32);
        for r in 0..32 {
            let l = b.lambda[r];
            prop_assert!((0.0..=1.0).contains(&l));
            prop_assert_eq!(b.is_real[r], l == 0.0 || l == 1.0);
            let (i, j) = b.source_indices[r];
            if l == 1.0 {
                prop_assert_eq!(b.x_tilde.row(r), data.features().row(i));
            }
            if l == 0.0 {
                prop_assert_eq!(b.x_tilde.row(r), data.features().row(j));
            }
            prop_assert!((b.y_tilde.row(r).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn lambda_one_returns_first_sample_bit_for_bit() {
    let xi = [0.1, -3.7e-9, 12345.678];
    let xj = [9.0, 8.0, 7.0];
    let y = [0.0, 1.0, 0.0, 0.0];
    let (x, _) = mix_pair(&xi, &y, &xj, &y, 1.0).unwrap();
    assert!(x.iter().zip(&xi).all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn disabled_mixup_keeps_every_row_real() {
    let data = small();
    let b = make_mixed_batch(&data, 50, &MixupConfig::disabled(), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    assert_eq!(b.real_rows().len(), 50);
}

#[test]
fn same_seed_same_batch() {
    let data = small();
    let cfg = MixupConfig::default();
    let a = make_mixed_batch(&data, 20, &cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    let b = make_mixed_batch(&data, 20, &cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn mismatched_lengths_and_bad_alpha_are_errors() {
    let y = [1.0, 0.0, 0.0, 0.0];
    assert!(mix_pair(&[1.0, 2.0], &y, &[1.0], &y, 0.5).is_err());
    let cfg = MixupConfig {
        alpha: 0.0,
        ..Default::default()
    };
    assert!(make_mixed_batch(&small(), 4, &cfg, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
}

#[test]
fn batch_converts_to_soft_target_dataset() {
    let data = small();
    let b = make_mixed_batch(&data, 16, &MixupConfig::default(), &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    let d = b.to_dataset(&data).unwrap();
    assert_eq!(d.len(), 16);
    assert_eq!(d.targets(), &b.y_tilde);
}
