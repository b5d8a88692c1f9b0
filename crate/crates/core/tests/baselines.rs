use mixgan::baselines::{baseline_ae_encode, baseline_ae_train, covariance, pca_fit, BaselineAeConfig};
use mixgan::data::{fit_normalizer, make_benchmark, BenchmarkConfig, NormKind};
use mixgan::mixup::MixupConfig;
use mixgan::nn::Matrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn components_are_orthonormal_and_sorted(v in prop::collection::vec(-5.0f64..5.0, 60), k in 1usize..6) {
        let x = Matrix::from_vec(10, 6, v).unwrap();
        let p = pca_fit(&x, k).unwrap();
        for a in 0..k {
            for b in 0..k {
                let dot: f64 = p.components.row(a).iter().zip(p.components.row(b)).map(|(s, t)| s * t).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() < 1e-9);
            }
        }
        prop_assert!(p.explained_variance.windows(2).all(|w| w[0] >= w[1] - 1e-12));
    }

    #[test]
    fn error_shrinks_as_k_grows(v in prop::collection::vec(-5.0f64..5.0, 48)) {
        let x = Matrix::from_vec(8, 6, v).unwrap();
        let errs: Vec<f64> = (1..=6).map(|k| pca_fit(&x, k).unwrap().reconstruction_error(&x).unwrap()).collect();
        prop_assert!(errs.windows(2).all(|w| w[1] <= w[0] + 1e-9));
        prop_assert!(errs[5] < 1e-18 + 1e-12 * errs[0]);
    }
}

#[test]
fn transform_then_inverse_recovers_rank_k_data() {
    // Rows on a 2-d plane in 5-d space.
    let rows: Vec<Vec<f64>> = (0..12)
        .map(|i| {
            let (a, b) = (i as f64 * 0.3, (i as f64).sin());
            vec![a + 1.0, b, a - b, 2.0 * a, -b + 0.5]
        })
        .collect();
    let x = Matrix::from_rows(&rows).unwrap();
    let p = pca_fit(&x, 2).unwrap();
    let back = p.inverse(&p.transform(&x).unwrap()).unwrap();
    for (a, b) in back.as_slice().iter().zip(x.as_slice()) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn covariance_matches_hand_computation() {
    let x = Matrix::from_rows(&[[1.0, 2.0], [3.0, 6.0], [5.0, 4.0]]).unwrap();
    let (c, mean) = covariance(&x).unwrap();
    assert_eq!(mean, vec![3.0, 4.0]);
    assert!((c.get(0, 0) - 4.0).abs() < 1e-12);
    assert!((c.get(0, 1) - 2.0).abs() < 1e-12);
    assert!((c.get(1, 1) - 4.0).abs() < 1e-12);
}

#[test]
fn bad_k_is_rejected() {
    let x = Matrix::zeros(4, 3);
    assert!(pca_fit(&x, 0).is_err());
    assert!(pca_fit(&x, 4).is_err());
}

#[test]
fn autoencoder_is_competitive_with_pca() {
    let raw = make_benchmark(&BenchmarkConfig {
        n_per_class: 50,
        dim: 16,
        ..Default::default()
    })
    .unwrap();
    let d = fit_normalizer(&raw, NormKind::MinMax).unwrap().apply(&raw).unwrap();
    let cfg = BaselineAeConfig {
        hidden: vec![32, 16],
        epochs: 150,
        learning_rate: 3e-3,
        ..Default::default()
    };
    let ae = baseline_ae_train(&d, 2, &cfg, &MixupConfig::disabled(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    let ae_err = ae.reconstruction_error(d.features()).unwrap();
    let pca_err = pca_fit(d.features(), 2).unwrap().reconstruction_error(d.features()).unwrap();
    assert!(ae_err < 1.5 * pca_err, "autoencoder {ae_err} vs pca {pca_err}");

    let codes = baseline_ae_encode(&ae, &d).unwrap();
    assert_eq!(codes.dim(), 2);
    assert_eq!(codes.labels(), d.labels());
}
