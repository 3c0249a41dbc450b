use lpzeta::experiments::{config_hash, Experiment, ExperimentConfig, OutputFormat, Report};
use serde_json::json;

fn kernel_cfg() -> ExperimentConfig {
    ExperimentConfig::new(Experiment::KernelCheck).with("orders", json!([1, 2]))
}

#[test]
fn reruns_are_byte_identical_apart_from_timestamp() {
    let a = kernel_cfg().run().unwrap();
    let b = kernel_cfg().run().unwrap();
    assert_eq!(a.to_csv(7), b.to_csv(7));
    assert_eq!(a.to_json(7), b.to_json(7));
    let (ca, cb) = (a.to_csv(1), a.to_csv(2));
    let differing: Vec<_> = ca.lines().zip(cb.lines()).filter(|(x, y)| x != y).collect();
    assert_eq!(differing.len(), 1);
    assert!(differing[0].0.starts_with("# generated-unix="));
}

#[test]
fn hash_depends_on_resolved_parameters_only() {
    let implicit = ExperimentConfig::new(Experiment::Parseval).run().unwrap();
    let explicit = ExperimentConfig::new(Experiment::Parseval).with("limit", 500).run().unwrap();
    assert_eq!(implicit.config_hash, explicit.config_hash);
    assert_eq!(implicit.config_hash, config_hash(Experiment::Parseval, &implicit.config));
    let other = ExperimentConfig::new(Experiment::Parseval).with("limit", 400).run().unwrap();
    assert_ne!(implicit.config_hash, other.config_hash);
}

#[test]
fn csv_header_and_json_roundtrip() {
    let r = kernel_cfg().run().unwrap();
    let csv = r.to_csv(0);
    let first = csv.lines().next().unwrap();
    assert_eq!(first, format!("# config-hash={} tool-version={}", r.config_hash, r.tool_version));
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.starts_with("anchor,"));
    let rows = csv.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(rows, r.rows.len());

    let v: serde_json::Value = serde_json::from_str(&r.to_json(0)).unwrap();
    assert_eq!(v["generated_unix"], 0);
    let back: Report = serde_json::from_value(v).unwrap();
    assert_eq!(back.rows.len(), r.rows.len());
    assert_eq!(back.checks, r.checks);
}

#[test]
fn write_creates_file_in_requested_format() {
    let dir = std::env::temp_dir().join(format!("lpzeta-report-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let r = kernel_cfg().run().unwrap();
    let path = dir.join("k.json");
    r.write(&path, OutputFormat::Json).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains(&r.config_hash));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unknown_parameter_is_rejected() {
    let err = ExperimentConfig::new(Experiment::Moment).with("bogus", 1).run();
    assert!(err.is_err());
}

#[test]
fn sandwich_check_catches_an_inflated_lower_constant() {
    let base = ExperimentConfig::new(Experiment::Theorem3)
        .with("deltas", json!([1.0]))
        .with("ps", json!([0.5]))
        .with("scan_t_max", 1e4)
        .with("i_qs", json!([0.3]))
        .with("i_deltas", json!([1.0]));
    let ok = base.clone().run().unwrap();
    assert!(ok.checks.iter().filter(|c| c.anchor == "moment-sandwich").all(|c| c.passed));
    let bad = base.with("lower_const", 50.0).run().unwrap();
    assert!(bad.checks.iter().any(|c| c.anchor == "moment-sandwich" && !c.passed));
}

#[test]
fn holder_split_holds_on_a_small_sample() {
    let r = ExperimentConfig::new(Experiment::HolderSplit).with("windows", 4).run().unwrap();
    assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
}
