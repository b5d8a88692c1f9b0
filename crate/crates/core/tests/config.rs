use mixgan::config::RunConfig;
use mixgan::eval::ExperimentKind;

#[test]
fn shipped_config_loads_and_validates() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/benchmark_within.toml");
    let cfg = RunConfig::load(path).unwrap();
    cfg.validate().unwrap();
    assert_eq!(cfg.experiment, ExperimentKind::Within);
    assert!(cfg.output_dir.is_absolute());
}

#[test]
fn relative_data_path_resolves_against_config_dir() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), "[data]\npath = \"x.csv\"\n").unwrap();
    let cfg = RunConfig::load(dir.path().join("c.toml")).unwrap();
    assert_eq!(cfg.data.path.as_deref(), Some(dir.path().join("x.csv").as_path()));
    let err = cfg.validate().unwrap_err().to_string();
    assert!(err.contains("data.path"), "{err}");
}

#[test]
fn cross_needs_a_target() {
    let cfg = RunConfig::from_toml_str("experiment = \"cross\"\n[data.benchmark]\n").unwrap();
    assert!(cfg.validate().unwrap_err().to_string().contains("target"));
}

#[test]
fn both_sources_set_is_rejected() {
    let cfg = RunConfig::from_toml_str("[data]\npath = \"a.csv\"\n[data.benchmark]\n").unwrap();
    assert!(cfg.validate().unwrap_err().to_string().contains("only one"));
}

#[test]
fn nested_value_errors_name_their_path() {
    let cfg = RunConfig::from_toml_str("[data.benchmark]\n[encoded.baseline_ae]\nbatch_size = 0\n").unwrap();
    let err = cfg.validate().unwrap_err().to_string();
    assert!(err.contains("encoded.baseline_ae"), "{err}");
    let cfg = RunConfig::from_toml_str("seeds = []\n[data.benchmark]\n").unwrap();
    assert!(cfg.validate().unwrap_err().to_string().contains("seeds"));
}

#[test]
fn hash_changes_with_content() {
    let a = RunConfig::from_toml_str("seeds = [1]\n").unwrap();
    let b = RunConfig::from_toml_str("seeds = [2]\n").unwrap();
    assert_ne!(a.hash(), b.hash());
}
