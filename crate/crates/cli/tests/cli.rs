use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qec")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const GHZ: &str = r#"{"dims":[2,2,2],"amplitudes":[[0.7071067811865476,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0.7071067811865476,0]]}"#;

#[test]
fn ghz_entropy_vector() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "ghz.json", GHZ);
    let out = qec(&["entropy-vector", &path]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "1,1,1,1,1,1,0");

    let out = qec(&["entropy-vector", &path, "--header"]);
    assert_eq!(stdout(&out).lines().next().unwrap(), "A,B,C,AB,AC,BC,ABC");
}

#[test]
fn v4_trace_out_in_paper_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v4.json");
    let out = qec(&["construct", "vN", "--n", "4", "--output", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = qec(&["entropy-vector", path.to_str().unwrap(), "--trace-out", "4", "--paper-order"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "2,2,2,4,4,4,2");
}

#[test]
fn construct_then_reload_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w4.json");
    let report: Value = serde_json::from_slice(&qec(&["construct", "wN", "--n", "4", "--output", path.to_str().unwrap()]).stdout).unwrap();
    let out = qec(&["entropy-vector", path.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let reloaded: Value = serde_json::from_slice(&out.stdout).unwrap();
    let verified: Vec<f64> = serde_json::from_value(report["verified"].clone()).unwrap();
    let values: Vec<f64> = serde_json::from_value(reloaded["values"].clone()).unwrap();
    assert_eq!(verified, values);
}

#[test]
fn malformed_input_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "bad.json", r#"{"dims":[2,2],"amplitude":[[1,0]]}"#);
    let out = qec(&["entropy-vector", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("amplitude"));

    let path = write(dir.path(), "truncated.json", r#"{"dims":[2,2],"#);
    assert_eq!(qec(&["entropy-vector", &path]).status.code(), Some(2));
}

#[test]
fn cone_check_on_the_small_ell_point() {
    let out = qec(&["cone-check", "--vector", "0.3,0.3,0.3,0.6,0.6,0.6,0.3", "--paper-order"]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["inside"], true);
    assert_eq!(r["line_ell"]["holds"], true);
    assert!(r["tip"]["exclusion_advisories"].as_array().unwrap().iter().any(|a| a == "refined"));
}

#[test]
fn cone_check_ghz_and_violations() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "ghz.json", GHZ);
    let r: Value = serde_json::from_slice(&qec(&["cone-check", "--state", &path]).stdout).unwrap();
    assert_eq!(r["inside"], true);
    assert_eq!(r["branch"], "both");

    let out = qec(&["cone-check", "--vector", "-1,1,1,1,1,1,1"]);
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!r["violated"].as_array().unwrap().is_empty());
}

#[test]
fn verify_lemmas_on_w4() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w4.json");
    qec(&["construct", "wN", "--n", "4", "--output", path.to_str().unwrap()]);
    let out = qec(&["verify-lemmas", path.to_str().unwrap(), "--party", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let sum = r["margins"]["theorem_sum"].as_f64().unwrap();
    assert!((sum - 4.0 * 3f64.log2()).abs() < 1e-9);
    for key in ["lemma1", "lemma2", "lemma3", "eps_margin", "sum_margin"] {
        assert!(r["margins"][key].as_f64().unwrap() >= -1e-8, "{key}");
    }
}

#[test]
fn verify_lemmas_rejects_mixed_states() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "mixed.json", r#"{"dims":[2],"matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#);
    let out = qec(&["verify-lemmas", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("purif"));
}

fn figure2_row(csv: &str, point: [f64; 3]) -> Vec<String> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>())
        .find(|f| (0..3).all(|k| (f[k].parse::<f64>().unwrap() - point[k]).abs() < 1e-12))
        .expect("grid point present")
}

#[test]
fn figure2_rows_along_ell() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.csv");
    let out = qec(&["figure2", "--resolution", "11", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "hA,hC,hABC,inside_sigma3,excluded_by_corollary");
    assert_eq!(csv.lines().count(), 1 + 11 * 11 * 11);
    assert_eq!(figure2_row(&csv, [1.0, 1.0, 1.0])[3..], ["true", "false"]);
    assert_eq!(figure2_row(&csv, [0.2, 0.2, 0.2])[3..], ["true", "true"]);
    assert_eq!(figure2_row(&csv, [0.0, 0.0, 0.0])[3], "true");
}

#[test]
fn construct_rejects_bad_parameters() {
    assert_eq!(qec(&["construct", "vN", "--n", "7"]).status.code(), Some(2));
    assert_eq!(qec(&["construct", "tilde-v4", "--a", "1,1,0,0"]).status.code(), Some(2));
}

#[test]
fn scale_probe_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "probe.json",
        r#"{"mode":"scale","scale":2.0,"dims":[4,4,4,4],"witness_v4":true,"restarts":1,"max_iterations":3,"parallel":false}"#,
    );
    let out = qec(&["probe", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(r["result"]["best_distance"].as_f64().unwrap() <= 1e-6);
}
