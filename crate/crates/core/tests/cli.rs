use std::fs;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_tracelab");

fn tracelab(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

#[test]
fn equidist_prints_a_report() {
    let out = tracelab(&["equidist-shift", "--p", "101"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["experiment"], "equidist-shift");
    assert_eq!(v["config"]["p"], 101);
    assert!(v["timing"].is_null());
}

#[test]
fn bad_parameters_exit_with_two() {
    for args in [
        &["equidist-shift", "--epsilon", "0.7"][..],
        &["partial-intervals", "--p", "7", "--e", "2"],
        &["equidist-shift", "--order", "3", "--ell", "3"],
        &["variance", "--family", "spheres"],
    ] {
        assert_eq!(tracelab(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn hyphenated_polynomials_are_accepted() {
    let out = tracelab(&["equidist-shift", "--p", "101", "--kind", "hyperelliptic", "--ell", "607", "--f", "-1;0;1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn out_writes_report_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run");
    let out = tracelab(&["variance", "--p", "101", "--set", "0;1;2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    for file in ["report.json", "averaged_density.csv", "family_stats.csv"] {
        assert!(path.join(file).exists(), "{file} missing");
    }
    let csv = fs::read_to_string(path.join("family_stats.csv")).unwrap();
    assert!(csv.starts_with("d,g,h\n"));
}

#[test]
fn monte_carlo_is_reproducible() {
    let args = ["model", "--kind", "SL", "--ell", "3", "--steps", "3", "--trials", "5000", "--seed", "42"];
    let a = tracelab(&args);
    let b = tracelab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn replay_reproduces_the_report_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    let run = tracelab(&["model", "--kind", "mu", "--n", "3", "--ell", "7", "--trials", "1000", "--out", first.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0));
    let report = first.join("report.json");
    let replay = tracelab(&["replay", report.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(replay.status.code(), Some(0), "{}", String::from_utf8_lossy(&replay.stderr));
    assert_eq!(fs::read(report).unwrap(), fs::read(second.join("report.json")).unwrap());
    assert_eq!(fs::read(first.join("law.csv")).unwrap(), fs::read(second.join("law.csv")).unwrap());
}

#[test]
fn replay_accepts_a_bare_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiment": "gauss-sum", "kind": "GL", "n": 2, "ell": 3}"#).unwrap();
    let out = tracelab(&["replay", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn replay_rejects_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiment": "model", "colour": "red"}"#).unwrap();
    assert_eq!(tracelab(&["replay", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn timing_is_opt_in() {
    let out = tracelab(&["--timing", "gauss-sum", "--kind", "GL", "--ell", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["timing"].as_f64().is_some());
}
