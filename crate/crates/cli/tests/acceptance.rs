//! CLI acceptance: determinism contract (criterion 9) and exit codes.

use std::process::{Command, Output};

fn ccmetric(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccmetric"))
        .args(args)
        .output()
        .expect("failed to spawn ccmetric")
}

#[test]
fn determinism_byte_identical_csv() {
    let args = ["lambda", "--z0", "0.3,0.7", "--deltas", "2,5,10"];
    let a = ccmetric(&args);
    let b = ccmetric(&args);
    assert!(a.status.success(), "stderr: {}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout, "identical argv must give byte-identical CSV");
    assert!(!a.stdout.is_empty());

    let cyl_args = ["cyl", "--p0", "0,0,0", "--delta", "5", "--samples", "10"];
    let c = ccmetric(&cyl_args);
    let d = ccmetric(&cyl_args);
    assert!(c.status.success());
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn lambda_csv_matches_quadratic_formula() {
    let out = ccmetric(&["lambda", "--z0", "0,0", "--deltas", "2,5,10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "delta_zunits,lower,upper");
    for (line, delta) in lines.zip([2.0f64, 5.0, 10.0]) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 3);
        let target = delta * delta / std::f64::consts::PI;
        assert!((cols[1] / target - 1.0).abs() < 0.05, "lower {} vs {}", cols[1], target);
        assert!(cols[1] <= cols[2]);
    }
}

#[test]
fn dist_matches_mu_formula() {
    let out = ccmetric(&["dist", "--p0", "0,0,0", "--p1", "0,0,12.566370614359172"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let d: f64 = text.lines().nth(1).unwrap().parse().unwrap();
    assert!((d / (2.0 * std::f64::consts::PI) - 1.0).abs() < 0.05, "d = {d}");
}

#[test]
fn twist_circle_is_four_pi() {
    let out = ccmetric(&[
        "twist",
        "--z0",
        "0,0",
        "--delta",
        "6.283185307179586",
        "--circle",
        "256",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let t: f64 = text.lines().nth(1).unwrap().parse().unwrap();
    assert!((t / (4.0 * std::f64::consts::PI) - 1.0).abs() < 0.01, "twist = {t}");
}

#[test]
fn decompose_masses_sum_to_loop_integral() {
    let dir = std::env::temp_dir().join("ccmetric_cli_accept");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fig8.json");
    std::fs::write(&path, "[[0,0],[2,2],[2,0],[0,2]]").unwrap();
    let out = ccmetric(&["decompose", "--loop", path.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let cycles = doc["cycles"].as_array().unwrap();
    assert_eq!(cycles.len(), 2);
    let sum = doc["mass_sum"].as_f64().unwrap();
    let total = doc["loop_integral"].as_f64().unwrap();
    assert!((sum - total).abs() < 1e-9 * (1.0 + total.abs()));
}

#[test]
fn config_error_exits_2_with_offending_key() {
    let dir = std::env::temp_dir().join("ccmetric_cli_accept");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"{"schema":"cc1","potential":{"kind":"quadratic"},"bogus":1}"#)
        .unwrap();
    let out = ccmetric(&[
        "lambda",
        "--config",
        path.to_str().unwrap(),
        "--z0",
        "0,0",
        "--deltas",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error: config:"), "stderr: {err}");
    assert!(err.contains("bogus"), "offending key not named: {err}");
}

#[test]
fn numeric_failure_exits_3() {
    let out = ccmetric(&["dist", "--p0", "0,0,0", "--p1", "0,0,1e30"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error: numeric:"), "stderr: {err}");
}

#[test]
fn version_and_help() {
    let v = ccmetric(&["--version"]);
    assert!(v.status.success());
    assert!(String::from_utf8_lossy(&v.stdout).starts_with("ccmetric "));
    for sub in ["lambda", "stockyard", "twist", "decompose", "ugs-check", "dist", "cyl", "volume"]
    {
        let h = ccmetric(&[sub, "--help"]);
        assert!(h.status.success(), "{sub} --help failed");
    }
}
