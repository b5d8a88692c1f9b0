use mixgan::baselines::pca_fit;
use mixgan::data::{fit_normalizer, loso_splits, make_benchmark, BenchmarkConfig, Emotion, NormKind};
use mixgan::eval::{
    confusion, mean_std, run_cross_corpus, run_within_corpus, train_classifier, train_classifier_tuned, uar,
    ClassifierConfig, ConfusionMatrix, ExperimentConfig, ExperimentKind, ExperimentReport,
};
use mixgan::FeatureDataset;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench(n: usize, dim: usize) -> FeatureDataset {
    make_benchmark(&BenchmarkConfig {
        n_per_class: n,
        dim,
        ..Default::default()
    })
    .unwrap()
}

fn fast_classifier(units: usize) -> ClassifierConfig {
    ClassifierConfig {
        hidden_units: units,
        learning_rate: 1e-3,
        epochs: 30,
        ..ClassifierConfig::real_only()
    }
}

#[test]
fn uar_of_known_matrix() {
    let truth = [0, 0, 0, 0, 1, 1, 2, 2, 3, 3];
    let pred = [0, 0, 0, 1, 1, 0, 2, 2, 3, 0];
    let cm = confusion(&truth, &pred, 4).unwrap();
    // recalls 0.75, 0.5, 1.0, 0.5
    assert!((uar(&cm).unwrap() - 0.6875).abs() < 1e-15);
    assert_eq!(cm.total(), 10);
}

#[test]
fn empty_classes_are_left_out_and_all_empty_is_an_error() {
    let cm = confusion(&[0, 0, 2], &[0, 1, 2], 4).unwrap();
    assert_eq!(cm.empty_classes(), vec![1, 3]);
    assert!((uar(&cm).unwrap() - 0.75).abs() < 1e-15);
    assert!(uar(&ConfusionMatrix::new(4)).is_err());
    assert!(confusion(&[0, 5], &[0, 1], 4).is_err());
}

#[test]
fn mean_std_is_population() {
    let (m, s) = mean_std(&[1.0, 3.0]);
    assert_eq!((m, s), (2.0, 1.0));
}

#[test]
fn classifier_loss_halves_on_separable_data() {
    let d = bench(30, 8);
    let d = fit_normalizer(&d, NormKind::ZScore).unwrap().apply(&d).unwrap();
    let fit = train_classifier(&d, &fast_classifier(32), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    let (first, last) = (fit.epoch_losses[0], *fit.epoch_losses.last().unwrap());
    assert!(last <= 0.5 * first, "{first} -> {last}");
    assert_eq!(fit.selected_epoch, 30);
}

#[test]
fn single_class_training_predicts_that_class() {
    let d = bench(20, 6);
    let idx: Vec<usize> = (0..d.len()).filter(|&i| d.labels()[i] == Emotion::Sad).collect();
    let only_sad = d.subset(&idx);
    let cfg = ClassifierConfig { learning_rate: 1e-2, ..fast_classifier(16) };
    let fit = train_classifier(&only_sad, &cfg, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let pred = fit.classifier.predict(only_sad.features()).unwrap();
    assert!(pred.iter().all(|&p| p == Emotion::Sad.index()));
}

#[test]
fn tuned_training_picks_a_valid_epoch() {
    let d = bench(30, 6);
    let folds = loso_splits(&d).unwrap();
    let fit = train_classifier_tuned(
        &folds[0].train,
        &folds[1].test,
        &fast_classifier(16),
        &mut ChaCha8Rng::seed_from_u64(2),
    )
    .unwrap();
    assert!((1..=30).contains(&fit.selected_epoch));
    assert_eq!(fit.epoch_losses.len(), 30);
}

#[test]
fn pca_with_one_dropped_direction_keeps_accuracy() {
    let d = bench(40, 8);
    let folds = loso_splits(&d).unwrap();
    let score = |project: bool| {
        let mut cms = ConfusionMatrix::new(4);
        for (k, f) in folds.iter().enumerate() {
            let norm = fit_normalizer(&f.train, NormKind::ZScore).unwrap();
            let (mut tr, mut te) = (norm.apply(&f.train).unwrap(), norm.apply(&f.test).unwrap());
            if project {
                let p = pca_fit(tr.features(), 7).unwrap();
                tr = tr.with_features(p.transform(tr.features()).unwrap()).unwrap();
                te = te.with_features(p.transform(te.features()).unwrap()).unwrap();
            }
            let fit = train_classifier(&tr, &fast_classifier(32), &mut ChaCha8Rng::seed_from_u64(k as u64)).unwrap();
            cms.merge(&fit.classifier.confusion(&te).unwrap()).unwrap();
        }
        uar(&cms).unwrap()
    };
    let (raw, pca) = (score(false), score(true));
    assert!((raw - pca).abs() <= 0.02, "raw {raw} pca {pca}");
}

fn tiny_experiment() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::benchmark();
    cfg.train.pretrain_epochs = 30;
    cfg.train.epochs = 5;
    cfg.seeds = vec![1, 2];
    for c in [
        &mut cfg.classifiers.real,
        &mut cfg.classifiers.synthetic,
        &mut cfg.classifiers.real_plus_synthetic,
        &mut cfg.cross_classifiers.real,
        &mut cfg.cross_classifiers.synthetic,
        &mut cfg.cross_classifiers.real_plus_synthetic,
    ] {
        c.epochs = 20;
    }
    cfg
}

#[test]
fn within_report_has_every_setting_seed_and_fold() {
    let d = bench(30, 16);
    let report = run_within_corpus(&d, &tiny_experiment()).unwrap();
    assert_eq!(report.experiment, ExperimentKind::Within);
    let names: Vec<&str> = report.settings.iter().map(|s| s.setting.as_str()).collect();
    assert_eq!(names, ["real", "synthetic", "real+synthetic"]);
    for s in &report.settings {
        assert_eq!(s.seeds.len(), 2);
        assert_eq!(s.fold_count(), 10);
        assert_eq!(s.confusion.total(), 2 * d.len() as u64);
        assert!(s.reference.is_some());
    }

    let back = ExperimentReport::from_json(&report.to_json().unwrap()).unwrap();
    assert_eq!(back, report);
    let mut csv = Vec::new();
    report.write_csv(&mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 1 + 3 * 10);
}

#[test]
fn cross_corpus_real_beats_chance() {
    let source = bench(60, 16);
    let target = make_benchmark(&BenchmarkConfig {
        n_per_class: 60,
        dim: 16,
        corpus: "target".into(),
        session_shift: 0.15,
        corpus_shift: 0.1,
        ..Default::default()
    })
    .unwrap();
    let report = run_cross_corpus(&source, &target, &tiny_experiment()).unwrap();
    assert_eq!(report.corpus, "benchmark->target");
    let real = report.setting("real").unwrap().mean_uar;
    assert!(real >= 0.25 + 0.15, "{real}");
}

#[test]
fn report_json_matches_schema_shape() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../schema/report.schema.json")).unwrap();
    let d = bench(20, 8);
    let mut cfg = tiny_experiment();
    cfg.train.pretrain_epochs = 2;
    cfg.train.epochs = 1;
    cfg.seeds = vec![1];
    let report = run_within_corpus(&d, &cfg).unwrap();
    let value: serde_json::Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
    check_required(&schema, &value, &schema, "$");
}

/// Walks `required`, `properties`, `items` and local `$ref`s only.
fn check_required(node: &serde_json::Value, value: &serde_json::Value, root: &serde_json::Value, at: &str) {
    if let Some(r) = node.get("$ref").and_then(|r| r.as_str()) {
        let mut target = root;
        for part in r.trim_start_matches("#/").split('/') {
            target = &target[part];
        }
        return check_required(target, value, root, at);
    }
    if let Some(req) = node.get("required").and_then(|r| r.as_array()) {
        for key in req {
            let key = key.as_str().unwrap();
            assert!(value.get(key).is_some(), "{at}: missing {key}");
        }
    }
    if let (Some(props), Some(obj)) = (node.get("properties").and_then(|p| p.as_object()), value.as_object()) {
        for (k, sub) in props {
            if let Some(v) = obj.get(k) {
                check_required(sub, v, root, &format!("{at}.{k}"));
            }
        }
    }
    if let (Some(items), Some(arr)) = (node.get("items"), value.as_array()) {
        for (i, v) in arr.iter().enumerate() {
            check_required(items, v, root, &format!("{at}[{i}]"));
        }
    }
}
