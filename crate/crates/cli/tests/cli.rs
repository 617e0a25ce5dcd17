use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cqg-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn cqg(args: &[&str], config: Option<&str>, dir: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cqg"));
    cmd.args(args);
    if let Some(text) = config {
        let path = dir.join("config.json");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn fluxes_at_right_angle() {
    let dir = scratch("fluxes");
    let out = cqg(&["fluxes"], Some(r#"{"theta_a_deg": [0], "theta_b_deg": [90]}"#), &dir);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert_eq!(rows[0][..4], ["theta_a_deg", "theta_b_deg", "phi_uu", "phi_ud"]);
    let phi_uu: f64 = rows[1][2].parse().unwrap();
    assert!((phi_uu - 0.25).abs() < 1e-12);
    let summary: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["passed"], true);
}

#[test]
fn bell_scan_flags_every_interior_row() {
    let dir = scratch("bell");
    let out = cqg(&["bell-scan"], Some(r#"{"delta_deg": [5, 10, 15, 20, 25, 30, 35, 40]}"#), &dir);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    let violated = rows[0].iter().position(|c| c == "violated").unwrap();
    assert_eq!(rows.len(), 9);
    assert!(rows[1..].iter().all(|r| r[violated] == "1"));
}

#[test]
fn mc_reruns_are_byte_identical() {
    let dir = scratch("mc");
    let args = ["mc", "--seed", "42", "--samples", "30000"];
    let a = cqg(&args, None, &dir);
    let b = cqg(&args, None, &dir);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
    let c = cqg(&["mc", "--seed", "43", "--samples", "30000"], None, &dir);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn json_format_embeds_rows() {
    let dir = scratch("json");
    let out = cqg(&["chsh", "--samples", "20000", "--format", "json"], None, &dir);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["command"], "chsh");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["inputs"]["samples"], 20000);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn out_writes_both_files() {
    let dir = scratch("out");
    let stem = dir.join("run");
    let out = cqg(&["gauge-check", "--out", stem.to_str().unwrap()], Some(r#"{"gauge_trials": 2}"#), &dir);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(stem.with_extension("csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(!csv.contains('\r'));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(stem.with_extension("json")).unwrap()).unwrap();
    assert!(v.get("rows").is_none());

    let clash = dir.join("config");
    let out = cqg(&["gauge-check", "--out", clash.to_str().unwrap()], Some("{}"), &dir);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_configs_exit_with_2() {
    let dir = scratch("invalid");
    assert_eq!(cqg(&["mc"], Some(r#"{"sead": 1}"#), &dir).status.code(), Some(2));
    assert_eq!(cqg(&["mc"], Some(r#"{"command": "chsh"}"#), &dir).status.code(), Some(2));
    assert_eq!(cqg(&["mc"], Some(r#"{"gyration_scale": 0}"#), &dir).status.code(), Some(2));
    assert_eq!(cqg(&["mc"], Some("not json"), &dir).status.code(), Some(2));
    assert_eq!(cqg(&["frobnicate"], None, &dir).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_cqg"))
        .arg("bell-scan")
        .env("CQG_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_check_exits_with_1() {
    let dir = scratch("fail");
    // a single draw has zero estimated spread but is far from the quadrature value
    let out = cqg(&["mc", "--samples", "1"], Some(r#"{"theta_a_deg": [0], "theta_b_deg": [90]}"#), &dir);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["passed"], false);
}
