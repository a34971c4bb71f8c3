use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qsphere(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsphere")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path_str(&path)
}

fn path_str(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

fn one() -> &'static str {
    r#"[{"alpha":0,"j":0,"k":0}]"#
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let args = ["verify", "--suite", "algebra", "pairing", "--format", "json", "--seed", "7"];
    let (a, b) = (qsphere(&args), qsphere(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["totals"]["passed"], true);
    assert_eq!(v["config"]["seed"], 7);
    assert!(v["suites"][0].get("elapsed_ms").is_none());
}

#[test]
fn timing_is_opt_in() {
    let out = qsphere(&["verify", "--suite", "pairing", "--format", "json", "--timing"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["suites"][0]["elapsed_ms"].is_u64());
}

#[test]
fn degree_zero_sweeps_pass_vacuously() {
    let out = qsphere(&["verify", "--suite", "leibniz", "commutation", "calculus", "--max-degree", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().last().unwrap().starts_with("PASS"));
}

#[test]
fn failing_suite_reports_counterexamples_and_exit_status() {
    let out = qsphere(&["verify", "--suite", "podles-rvf", "--max-degree", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = v["suites"][0]["checks"].as_array().unwrap();
    let failing = checks.iter().find(|c| c["passed"] == false).unwrap();
    let f = &failing["failures"][0];
    assert!(f["lhs"].is_array() && f["rhs"].is_array());
    assert!(f["lhs"][0]["coeff"]["num"].is_array());
}

#[test]
fn non_hermitian_metric_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let a = r#"[{"alpha":1,"j":0,"k":0}]"#;
    let metric = format!(r#"{{"h": [[{one}, {a}, []], [[], {one}, []], [[], [], {one}]]}}"#, one = one());
    let path = write(&dir, "metric.json", &metric);
    let out = qsphere(&["verify", "--suite", "levi-civita", "--metric", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("not hermitian at entry (0, 1)"), "{err}");
}

#[test]
fn malformed_json_reports_location() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "params.json", "{\"tau1\": [");
    let out = qsphere(&["verify", "--suite", "pairing", "--params", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 1, column"));
}

#[test]
fn unknown_suite_is_rejected() {
    let out = qsphere(&["verify", "--suite", "everything"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn act_applies_generators_on_both_sides() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.json", r#"[{"alpha":0,"j":1,"k":0}]"#);
    let out = qsphere(&["act", "--op", "E", "--side", "left", "--element", &c]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    // E ▷ c = a∗
    assert_eq!(v["result"].as_array().unwrap().len(), 1);
    assert_eq!(v["result"][0]["alpha"], -1);
    assert_eq!(v["result"][0]["j"], 0);

    let out = qsphere(&["act", "--op", "E", "--side", "right", "--element", &c]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    // c ◁ E = a
    assert_eq!(v["result"][0]["alpha"], 1);
}

#[test]
fn act_reads_word_lists() {
    let dir = TempDir::new().unwrap();
    let op = write(&dir, "op.json", r#"{"words": [["K"], ["K^-1"]], "coeffs": ["1", "-1"]}"#);
    let x = write(&dir, "x.json", one());
    let out = qsphere(&["act", "--op", &op, "--element", &x]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    // (K − K⁻¹) ▷ 1 = 0
    assert_eq!(v["result"], Value::Array(vec![]));
}

#[test]
fn levi_civita_emits_and_verifies_27_symbols() {
    let dir = TempDir::new().unwrap();
    let metric = format!(r#"{{"h": [[{o}, [], []], [[], {o}, []], [[], [], {o}]], "side": "right"}}"#, o = one());
    let path = write(&dir, "delta.json", &metric);
    let out = qsphere(&["levi-civita", "--metric", &path, "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["gamma_tilde"].as_object().unwrap().len(), 27);
    assert_eq!(v["gamma_tilde"]["++,+"], Value::Array(vec![]));
    assert!(!v["gamma_tilde"]["+z,+"].as_array().unwrap().is_empty());
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    assert!(checks.iter().all(|c| c["failed"] == 0));
}

#[test]
fn levi_civita_rejects_the_reality_violation() {
    let dir = TempDir::new().unwrap();
    let o = one();
    let acs = r#"[{"alpha":1,"j":0,"k":1}]"#;
    // (ac∗)∗ = ca∗ = q a∗c
    let cas = r#"[{"alpha":-1,"j":1,"k":0,"coeff":{"shift":2,"num":["1"]}}]"#;
    let metric = format!(r#"{{"h": [[{o}, [], {acs}], [[], {o}, []], [{cas}, [], {o}]]}}"#);
    let path = write(&dir, "real.json", &metric);
    let out = qsphere(&["levi-civita", "--metric", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("reality condition fails"));
}
