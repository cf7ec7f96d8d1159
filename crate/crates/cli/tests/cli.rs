use std::path::Path;
use std::process::{Command, Output};

fn pmg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmg")).current_dir(dir).args(args).output().expect("spawn pmg")
}

fn design(dir: &Path) {
    let out = pmg(dir, &["design", "--gamma", "0.65", "--target", "pow:0.6", "--levels", "12", "--out", "seq.json", "--report", "cert.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn design_writes_sequence_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    design(dir.path());
    let seq: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("seq.json")).unwrap()).unwrap();
    assert_eq!(seq["head"].as_array().unwrap().len(), 12);
    let cert: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("cert.json")).unwrap()).unwrap();
    assert!(cert["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn design_rejects_fast_target() {
    let dir = tempfile::tempdir().unwrap();
    let out = pmg(dir.path(), &["design", "--gamma", "0.65", "--target", "pow:0.9", "--out", "seq.json"]);
    assert!(!out.status.success());
    assert!(!dir.path().join("seq.json").exists());
}

#[test]
fn chain_table_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    design(dir.path());
    let out = pmg(dir.path(), &["chain", "--seq", "seq.json", "--horizon", "500", "--out", "tail.csv", "--verify"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("tail.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ["i", "P_T_gt_i", "partial_sum", "alpha_n", "lower_bound", "upper_bound", "margin_low", "margin_high"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 500);
    for r in &rows {
        let lo: f64 = r[6].parse().unwrap();
        let hi: f64 = r[7].parse().unwrap();
        assert!(lo >= 0.0 && hi >= 0.0);
    }
}

#[test]
fn simulate_orbit_and_raytree_stats() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("two.json"), r#"{"head":[2],"extension":{"kind":"constant"}}"#).unwrap();
    let args = ["simulate", "--seq", "two.json", "--steps", "128", "--replicas", "50", "--seed", "3", "--stats", "orbit,raytree", "--out", "stats.csv"];
    let out = pmg(dir.path(), &args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let first = std::fs::read_to_string(dir.path().join("stats.csv")).unwrap();
    assert_eq!(first.lines().count(), 51);
    assert!(!first.contains("false"));
    let again = pmg(dir.path(), &args);
    assert!(again.status.success());
    assert_eq!(first, std::fs::read_to_string(dir.path().join("stats.csv")).unwrap());
}

#[test]
fn simulate_wreath_columns() {
    let dir = tempfile::tempdir().unwrap();
    design(dir.path());
    for lamps in ["z", "z2"] {
        let out = pmg(
            dir.path(),
            &["simulate", "--seq", "seq.json", "--wreath", "--lamps", lamps, "--grid", "2^4:2^7", "--replicas", "20", "--out", "speed.csv"],
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let mut rdr = csv::Reader::from_path(dir.path().join("speed.csv")).unwrap();
        assert_eq!(rdr.headers().unwrap().len(), 10);
        let ns: Vec<u64> = rdr.records().map(|r| r.unwrap()[0].parse().unwrap()).collect();
        assert_eq!(ns, [16, 32, 64, 128]);
    }
}

#[test]
fn verify_passes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    design(dir.path());
    let out = pmg(dir.path(), &["verify", "--seq", "seq.json", "--grid", "2^4:2^10", "--out", "checks.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("checks.json")).unwrap()).unwrap();
    assert!(!report["checks"].as_array().unwrap().is_empty());
}

#[test]
fn missing_sequence_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = pmg(dir.path(), &["verify", "--seq", "nope.json"]);
    assert_eq!(out.status.code(), Some(2));
}
