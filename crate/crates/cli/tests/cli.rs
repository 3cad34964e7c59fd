//! End-to-end tests of the binary: exit codes, CSV schema and determinism,
//! and the verification subcommand's pass/fail behaviour.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diracsea"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diracsea"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn mode_energy_default_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("row.csv");
    let res = run(&["mode-energy", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{res:?}");

    let body = fs::read_to_string(&out).unwrap();
    let mut lines = body.lines();
    assert_eq!(
        lines.next().unwrap(),
        "lambda,p,E,eps_exact,eps_oracle,eps0,eps1,eps2,delta_exact,delta_pert,residual,norm_drift"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 12);
    assert_eq!(row[0], "-1");

    // 17 significant digits in scientific notation.
    for field in &row[1..] {
        let mantissa = field.split('e').next().unwrap();
        let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
        assert_eq!(digits.len(), 17, "field {field}");
        let _: f64 = field.parse().unwrap();
    }

    // The demo point: delta_exact and delta_pert agree to third order.
    let delta_exact: f64 = row[8].parse().unwrap();
    let delta_pert: f64 = row[9].parse().unwrap();
    assert!((delta_exact - delta_pert).abs() <= 1e-6);
    assert!((delta_pert - (-7.0868e-3)).abs() <= 1e-6);
    assert_eq!(lines.next(), None, "exactly one data row");
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    let sweep_to = |out: &Path| {
        let res = run(&[
            "sweep",
            "--p-max",
            "2",
            "--n-points",
            "9",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success());
    };
    sweep_to(&first);
    sweep_to(&second);
    let a = fs::read(&first).unwrap();
    let b = fs::read(&second).unwrap();
    assert_eq!(a, b, "reruns must be byte-identical");
    assert!(!a.contains(&b'\r'), "LF endings only");
}

#[test]
fn rejects_sign_mismatch_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.csv");
    let res = run(&[
        "mode-energy",
        "--alpha",
        "0.01",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(!out.exists(), "no output file on validation error");
    let err = String::from_utf8(res.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "single-line error: {err}");
    assert!(err.contains("validation"));
}

#[test]
fn rejects_bad_lambda_and_future_t1() {
    let res = run(&["mode-energy", "--lambda", "2", "--out", "/tmp/x.csv"]);
    assert_eq!(res.status.code(), Some(2));
    let res = run(&["mode-energy", "--t1", "0.5", "--out", "/tmp/x.csv"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn zero_field_reports_zero_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zero.csv");
    let res = run(&["mode-energy", "--alpha", "0", "--out", out.to_str().unwrap()]);
    assert!(res.status.success());
    let body = fs::read_to_string(&out).unwrap();
    let row: Vec<&str> = body.lines().nth(1).unwrap().split(',').collect();
    let delta_exact: f64 = row[8].parse().unwrap();
    let delta_pert: f64 = row[9].parse().unwrap();
    assert!(delta_exact.abs() <= 1e-12);
    assert_eq!(delta_pert, 0.0);
}

#[test]
fn vacuum_summary_and_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("vac.csv");
    let res = run_in(
        dir.path(),
        &[
            "vacuum",
            "--p-max",
            "50",
            "--n-points",
            "401",
            "--out",
            out.to_str().unwrap(),
        ],
    );
    assert!(res.status.success());
    let stdout = String::from_utf8(res.stdout).unwrap();
    assert!(stdout.contains("integral_I"));
    assert!(stdout.contains("verdict: density < 0: true"));

    let body = fs::read_to_string(&out).unwrap();
    assert!(body.starts_with("p,pair_pert,pair_exact\n"));
    assert_eq!(body.lines().count(), 402);
}

#[test]
fn vacuum_without_field_reports_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("vac.csv");
    let res = run(&[
        "vacuum",
        "--alpha",
        "0",
        "--p-max",
        "50",
        "--n-points",
        "101",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{res:?}");
    let stdout = String::from_utf8(res.stdout).unwrap();
    assert!(stdout.contains("verdict: density < 0: zero"), "{stdout}");
    assert!(stdout.contains("density_pert  = -0.0000000000000000e0")
        || stdout.contains("density_pert  = 0.0000000000000000e0"));
}

#[test]
fn vacuum_small_cutoff_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("vac.csv");
    let res = run(&[
        "vacuum",
        "--p-max",
        "0.1",
        "--n-points",
        "11",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn verify_passes_by_default_within_budget() {
    let started = std::time::Instant::now();
    let res = run(&["verify"]);
    let elapsed = started.elapsed();
    assert!(res.status.success(), "{res:?}");
    let stdout = String::from_utf8(res.stdout).unwrap();
    for group in ["specfun", "norms", "identities", "scaling", "routes"] {
        assert!(stdout.contains(&format!("PASS {group}")), "{stdout}");
    }
    assert!(elapsed.as_secs() < 60, "verify took {elapsed:?}");
}

#[test]
fn verify_group_filter_runs_one_group() {
    let res = run(&["verify", "--group", "identities"]);
    assert!(res.status.success());
    let stdout = String::from_utf8(res.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1);
    assert!(stdout.contains("PASS identities"));

    let res = run(&["verify", "--group", "nonsense"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn verify_loosened_tolerance_fails_scaling() {
    let res = run(&["verify", "--group", "scaling", "--tol", "1e-2"]);
    assert_eq!(res.status.code(), Some(1));
    let stdout = String::from_utf8(res.stdout).unwrap();
    assert!(stdout.contains("FAIL scaling"), "{stdout}");
}
