//! End-to-end tests of the `mixconc` binary: report contents, byte
//! stability, exit codes, and the error JSON contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn mixconc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixconc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn mixing_reports_f1_norm() {
    let spec = fixture("f1.json");
    let out = mixconc(&["mixing", "--spec", spec.to_str().unwrap()]);
    let json = stdout_json(&out);
    assert_eq!(json["schema"], "mixconc/1");
    assert!((json["inf_norm"].as_f64().unwrap() - 1.75).abs() < 1e-12);
    assert_eq!(json["h_rows"].as_array().unwrap().len(), 3);
}

#[test]
fn certify_starts_at_two() {
    let spec = fixture("f1.json");
    let out = mixconc(&[
        "certify",
        "--spec",
        spec.to_str().unwrap(),
        "--c",
        "1",
        "--metric",
        "hamming",
        "--t",
        "0:0.25:3",
    ]);
    let json = stdout_json(&out);
    assert_eq!(json["bound"][0], 2.0);
    assert_eq!(json["t_grid"].as_array().unwrap().len(), 13);
    // inclusive endpoint within tolerance
    assert!((json["t_grid"][12].as_f64().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn certify_with_delta_constant_matches_mixing_norm() {
    let spec = fixture("f4.json");
    let out = mixconc(&[
        "certify",
        "--spec",
        spec.to_str().unwrap(),
        "--constant",
        "delta",
        "--t",
        "0,1",
    ]);
    let json = stdout_json(&out);
    assert_eq!(json["constant_kind"], "delta-inf-norm");
    assert!(json["constant"].as_f64().unwrap() <= 1.75 + 1e-12);
}

#[test]
fn psi_and_oracle_agree_on_f1() {
    let spec = fixture("f1.json");
    let psi = stdout_json(&mixconc(&[
        "psi",
        "--spec",
        spec.to_str().unwrap(),
        "--prefix",
        "a",
        "--i",
        "1",
    ]));
    assert!((psi["psi_norm"].as_f64().unwrap() - 0.875).abs() < 1e-12);
    let oracle = stdout_json(&mixconc(&[
        "phi-oracle",
        "--spec",
        spec.to_str().unwrap(),
        "--prefix",
        "a",
    ]));
    assert!((oracle["value"].as_f64().unwrap() - 0.875).abs() < 1e-12);
}

#[test]
fn bar_reports_count_function() {
    let spec = fixture("f1.json");
    let json = stdout_json(&mixconc(&[
        "bar",
        "--spec",
        spec.to_str().unwrap(),
        "--z",
        "a",
    ]));
    assert_eq!(json["bar_rows"][0], "10");
    assert!((json["extremal"]["gap"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn simulate_passes_on_f1_and_writes_tsv() {
    let spec = fixture("f1.json");
    let tsv = std::env::temp_dir().join("mixconc_cli_test.tsv");
    let json = stdout_json(&mixconc(&[
        "simulate",
        "--spec",
        spec.to_str().unwrap(),
        "--functional",
        "hamming-weight:a",
        "--seed",
        "7",
        "--count",
        "2000",
        "--t",
        "0:0.5:3",
        "--mean",
        "exact",
        "--tsv",
        tsv.to_str().unwrap(),
    ]));
    assert_eq!(json["comparison"]["overall_pass"], true);
    let table = std::fs::read_to_string(&tsv).unwrap();
    assert!(table.starts_with("t\tempirical\tupper_conf\tbound\teffective_bound\tverdict"));
    assert_eq!(table.lines().count(), 8);
    std::fs::remove_file(tsv).ok();
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let spec = fixture("f1.json");
    let args = [
        "simulate",
        "--spec",
        spec.to_str().unwrap(),
        "--functional",
        "hamming-weight:a",
        "--seed",
        "42",
        "--count",
        "1000",
        "--t",
        "0:1:3",
    ];
    let first = mixconc(&args);
    let second = mixconc(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn missing_file_gives_error_json_and_exit_one() {
    let out = mixconc(&["mixing", "--spec", "/nonexistent/nope.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["schema"], "mixconc/1");
    assert_eq!(err["error"]["kind"], "invalid-parameter");
}

#[test]
fn capacity_exhaustion_exits_two() {
    let spec = fixture("f1_n100.json");
    let out = mixconc(&["mixing", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "capacity");
}

#[test]
fn budget_env_var_is_honored() {
    let spec = fixture("f1.json");
    let out = Command::new(env!("CARGO_BIN_EXE_mixconc"))
        .args(["mixing", "--spec", spec.to_str().unwrap()])
        .env("MIXCONC_BUDGET", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_budget_exhaustion_exits_two() {
    let spec = fixture("f1.json");
    let out = mixconc(&[
        "phi-oracle",
        "--spec",
        spec.to_str().unwrap(),
        "--prefix",
        "a",
        "--oracle-budget",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "oracle-budget");
}

#[test]
fn verify_single_suite_exits_zero() {
    let out = mixconc(&["verify", "--suite", "contraction-lemma,bar-cardinality"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["overall_pass"], true);
    assert_eq!(json["outcomes"].as_array().unwrap().len(), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("[PASS] contraction-lemma"));
}

#[test]
fn unknown_suite_is_a_validation_error() {
    let out = mixconc(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_t_grid_rejected() {
    let spec = fixture("f1.json");
    for grid in ["3:0.5:0", "0:-1:3", "2,1", "-1,0"] {
        let out = mixconc(&[
            "certify",
            "--spec",
            spec.to_str().unwrap(),
            "--t",
            grid,
        ]);
        assert_eq!(out.status.code(), Some(1), "grid {grid} should fail");
    }
}
