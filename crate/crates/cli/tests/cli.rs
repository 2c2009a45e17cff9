//! End-to-end checks of the binary: argument handling, file expansion,
//! exit codes and the CSV shape.

use std::process::Command;

fn lqlab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_lqlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn survival_closed_form_rows() {
    let out = lqlab(&[
        "survival", "kind=brownian", "sigma=1", "--t", "1", "--u", "0,0.5,1", "--method", "closed",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "model,command,method,t,u,x,q,value,stderr,flags");
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("kind=brownian sigma=1,survival,closed,1,0.5,,,5.54319148e-2"));
}

#[test]
fn decay_rates_print_twelve_digits() {
    let out = lqlab(&[
        "asymp-light", "kind=brownian", "sigma=1", "--regime", "proportional", "--A", "1", "--T", "4",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("-1.00000000000e1"), "{text}");
    assert!(text.contains("asymptotic"));
}

#[test]
fn args_file_expansion() {
    let dir = std::env::temp_dir().join("lqlab_cli_test_args");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("req.txt");
    std::fs::write(
        &path,
        "survival\nkind=brownian\nsigma=1\n# a comment line\n--t\n1\n--u\n0.5\n--method\nclosed\n",
    )
    .unwrap();
    let out = lqlab(&[&format!("@{}", path.display())]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("5.54319148e-2"));
}

#[test]
fn parse_errors_exit_2_with_location() {
    let out = lqlab(&["survival", "kind=brownian", "sigma=abc", "--t", "1", "--u", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("token 1"), "{err}");

    let out = lqlab(&["survival", "kind=brownian", "sigma=1", "--t", "1", "--u", "zzz"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("argument 7"), "{err}");

    // missing required grid
    let out = lqlab(&["survival", "kind=brownian", "sigma=1", "--t", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_3_with_grid_point() {
    // degenerate negative-jump model: the right inverse does not exist
    let out = lqlab(&[
        "survival", "kind=cpn", "lambda=1", "mu=1", "--t", "1", "--u", "0.5", "--method", "invert",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("t=1 u=0.5"), "{err}");
}

#[test]
fn mc_flags_travel_to_the_estimate() {
    let out = lqlab(&[
        "simulate", "kind=stable", "alpha=1.5", "beta=1", "--t", "0.5", "--u", "0.5", "--paths",
        "500", "--dt", "0.05", "--burn-in", "5", "--seed", "9",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("approximate-stationarity"), "{text}");
}

#[test]
fn workers_env_override_must_be_numeric() {
    let out = Command::new(env!("CARGO_BIN_EXE_lqlab"))
        .args(["survival", "kind=brownian", "sigma=1", "--t", "1", "--u", "0", "--method", "mc",
               "--paths", "1000"])
        .env("LQLAB_THREADS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_reports_and_exits_zero_on_pass() {
    let out = lqlab(&[
        "validate", "kind=cpp", "lambda=1", "mu=1", "--paths", "20000", "--seed", "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("all checks passed"), "{err}");
    assert!(err.contains("primary-vs-fallback"));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.contains("invert-sp-fallback"));
    assert!(csv.contains("fallback-inversion"));
}
