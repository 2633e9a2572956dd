use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use multiplier_lab::experiments::{run_default, CSV_HEADER, EXPERIMENTS};

fn mlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlab")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn passing_run_exits_zero() {
    let out = mlab(&["aniso-homogeneity"]);
    assert_eq!(out.status.code(), Some(0));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["experiment"], "aniso-homogeneity");
    assert_eq!(rep["criterion"], 17);
}

#[test]
fn failing_criterion_exits_one_and_flags_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "tight.json",
        r#"{"experiment": "sparse-weighted", "params": {"recorded_constant": 0.1}}"#,
    );
    let out = mlab(&["sparse-weighted", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER.join(",").as_str()));
    assert!(text.lines().any(|l| l.contains("max ratio over the ladder") && l.ends_with(",false")));
}

#[test]
fn config_and_path_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(mlab(&["no-such-experiment"]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.json", r#"{"experiment": "ap-char", "params": {"weigth": 1}}"#);
    let out = mlab(&["ap-char", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("weigth"));
    let empty = write(dir.path(), "empty.json", "");
    assert_eq!(mlab(&["ap-char", "--config", empty.to_str().unwrap()]).status.code(), Some(2));
    let other = write(dir.path(), "other.json", r#"{"experiment": "hilbert"}"#);
    assert_eq!(mlab(&["ap-char", "--config", other.to_str().unwrap()]).status.code(), Some(2));
    let out = mlab(&["aniso-homogeneity", "--out", "/nonexistent/dir/report.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/report.json"));
}

#[test]
fn reports_are_byte_identical_across_runs_and_parallelism() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", r#"{"experiment": "ap-char", "seed": 7, "params": {"intervals": 2000}}"#);
    let b = write(dir.path(), "b.json", r#"{"experiment": "partition-unity", "seed": 3}"#);
    let args = |par: &str| {
        vec![
            "all".to_string(),
            "--config".into(),
            a.display().to_string(),
            "--config".into(),
            b.display().to_string(),
            "--parallel".into(),
            par.into(),
        ]
    };
    let run = |par: &str| {
        let v = args(par);
        mlab(&v.iter().map(String::as_str).collect::<Vec<_>>()).stdout
    };
    let first = run("1");
    assert!(!first.is_empty());
    assert_eq!(first, run("1"));
    assert_eq!(first, run("2"));
}

#[test]
fn seed_flag_overrides_the_config() {
    let out = mlab(&["ap-char", "--seed", "11"]);
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["seed"], 11);
}

#[test]
fn list_names_every_experiment() {
    let text = String::from_utf8(mlab(&["list"]).stdout).unwrap();
    for e in EXPERIMENTS {
        assert!(text.contains(e.name));
    }
}

#[test]
fn schema_covers_every_experiment_and_param() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/experiment-config.schema.json");
    let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!(schema["version"].is_string());
    let variants = schema["oneOf"].as_array().unwrap();
    assert_eq!(variants.len(), EXPERIMENTS.len());
    for e in EXPERIMENTS {
        let v = variants
            .iter()
            .find(|v| v["properties"]["experiment"]["const"] == e.name)
            .unwrap_or_else(|| panic!("{} missing from schema", e.name));
        let mut listed: Vec<&String> = v["properties"]["params"]["properties"].as_object().unwrap().keys().collect();
        let resolved = run_default_params(e.name);
        let mut want: Vec<&String> = resolved.as_object().unwrap().keys().collect();
        listed.sort();
        want.sort();
        assert_eq!(listed, want, "{}", e.name);
    }
}

fn run_default_params(name: &str) -> serde_json::Value {
    multiplier_lab::experiments::ExperimentConfig::new(name, 0, serde_json::json!({})).unwrap().params
}

#[test]
fn library_reports_match_the_cli() {
    let lib = run_default("rbdd-variation", 0).unwrap();
    let out = mlab(&["rbdd-variation"]);
    let cli: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(serde_json::to_value(&lib).unwrap(), cli);
}
