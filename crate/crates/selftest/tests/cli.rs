//! The `selftest` binary: files, exit codes and manifests.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use selftest::output::{read_curve_csv, sha256_hex, RunManifest};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selftest")).current_dir(dir).args(args).output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn synth_writes_json_with_the_best_value() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["synth", "--phi", "0.09275644pi", "--out", "a"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&tmp.path().join("a/synth.json"));
    assert!((v["q"].as_f64().unwrap() - 1.49177284).abs() < 1e-6);
    assert!((v["local_bound"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["inequality"]["pi_coeffs"].as_array().unwrap().len(), 9);

    let m = RunManifest::read(&tmp.path().join("a/synth.manifest.json")).unwrap();
    assert_eq!(m.command, "synth");
    assert_eq!(m.outputs.len(), 1);
    let bytes = std::fs::read(tmp.path().join("a/synth.json")).unwrap();
    assert_eq!(m.outputs[0].sha256, sha256_hex(&bytes));
}

#[test]
fn exact_synthesis_without_marginals() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["synth", "--phi", "pi/4", "--no-marginals", "--exact", "--out", "a"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("exact Q/L = 7/6"));
    let v = read_json(&tmp.path().join("a/synth.json"));
    assert_eq!(v["exact"]["q_over_l"], serde_json::json!({"rat": [7, 6], "rad2": [0, 1]}));
    let bad = run(tmp.path(), &["synth", "--phi", "0.2", "--exact", "--out", "b"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn scan_writes_one_row_per_grid_point() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["synth", "--scan", "0:pi/4:512", "--svg", "--out", "s"]);
    // phi = 0 admits no violation, so the scan reports flagged rows.
    assert_eq!(out.status.code(), Some(2));
    let csv = std::fs::read_to_string(tmp.path().join("s/scan.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("phi,Q_over_L"));
    assert_eq!(lines.count(), 512);
    assert!(csv.lines().nth(1).unwrap().ends_with(",1.0"));
    let svg = std::fs::read_to_string(tmp.path().join("s/scan.svg")).unwrap();
    assert!(svg.contains("class=\"baseline\""));
}

#[test]
fn bounds_table_and_unknown_names() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["bounds", "--out", "b"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("872 - 48√2"), "{stdout}");
    let rows = read_json(&tmp.path().join("b/bounds.json"));
    let find = |name: &str| rows.as_array().unwrap().iter().find(|r| r["inequality"] == name).unwrap()["local_bound_exact"].clone();
    assert_eq!(find("mermin"), serde_json::json!({"rat": [2, 1], "rad2": [0, 1]}));
    assert_eq!(find("b2"), serde_json::json!({"rat": [872, 1], "rad2": [-48, 1]}));

    let bad = run(tmp.path(), &["bounds", "--ineq", "nonesuch"]);
    assert_eq!(bad.status.code(), Some(1));
    let err = String::from_utf8_lossy(&bad.stderr);
    for name in selftest_core::bell::builtin::NAMES {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn bounds_of_a_user_file() {
    let tmp = tempfile::tempdir().unwrap();
    let chsh = r#"{"parties": 2, "terms": [
        {"settings": [1, 1], "coeff": 1}, {"settings": [1, 2], "coeff": 1},
        {"settings": [2, 1], "coeff": 1}, {"settings": [2, 2], "coeff": -1}]}"#;
    std::fs::write(tmp.path().join("chsh.json"), chsh).unwrap();
    let out = run(tmp.path(), &["bounds", "--ineq", "chsh.json", "--out", "b"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = read_json(&tmp.path().join("b/bounds.json"));
    assert_eq!(rows[0]["local_bound"], 2.0);
}

#[test]
fn seesaw_is_deterministic_given_the_seed() {
    let tmp = tempfile::tempdir().unwrap();
    for dir in ["x", "y"] {
        let out = run(tmp.path(), &["seesaw", "--ineq", "mermin", "--seeds", "8", "--rng", "7", "--out", dir]);
        assert_eq!(out.status.code(), Some(0));
    }
    let x = std::fs::read(tmp.path().join("x/seesaw.json")).unwrap();
    let y = std::fs::read(tmp.path().join("y/seesaw.json")).unwrap();
    assert_eq!(x, y);
    let v: Value = serde_json::from_slice(&x).unwrap();
    assert!((v["value"].as_f64().unwrap() - 4.0).abs() < 1e-6);
    assert_eq!(v["observables"]["kind"], "angles");
}

#[test]
fn selftest_exports_one_sdpa_file_per_point_and_replays() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["selftest", "--target", "GHZ3", "--qgrid", "3.4:4:2", "--export-sdpa", "sdpa", "--svg", "--out", "c"];
    let out = run(tmp.path(), &args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let files: Vec<_> = std::fs::read_dir(tmp.path().join("sdpa")).unwrap().collect();
    assert_eq!(files.len(), 2);
    let rows = read_curve_csv(&std::fs::read_to_string(tmp.path().join("c/curve.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].q, 3.4);
    assert!(rows[1].f >= 0.99);
    let meta = read_json(&tmp.path().join("c/curve.meta.json"));
    assert_eq!(meta["baseline"], 0.5);
    assert_eq!(meta["level"], "local2");
    assert!(meta["solver"]["tol"].is_number());

    let replay = run(tmp.path(), &["replay", "c/selftest.manifest.json", "--out", "r"]);
    assert_eq!(replay.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&replay.stdout);
    assert!(stdout.contains("curve.csv: identical"), "{stdout}");
    assert!(stdout.contains("sdpa/point_001.dat-s: identical"), "{stdout}");
}

#[test]
fn four_party_targets_need_the_heavy_switch() {
    let tmp = tempfile::tempdir().unwrap();
    for target in ["GHZ4", "CL"] {
        let out = run(tmp.path(), &["selftest", "--target", target, "--out", "h"]);
        assert_eq!(out.status.code(), Some(1));
        assert!(String::from_utf8_lossy(&out.stderr).contains("--allow-heavy"));
    }
    let out = run(tmp.path(), &["selftest", "--target", "W4"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("GHZ3"));
}

#[test]
fn usage_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), &["synth", "--phi", "pi/"]).status.code(), Some(1));
    assert_eq!(run(tmp.path(), &["npa", "--ineq", "mermin", "--level", "local9"]).status.code(), Some(1));
    assert_eq!(run(tmp.path(), &["--help"]).status.code(), Some(0));
}
