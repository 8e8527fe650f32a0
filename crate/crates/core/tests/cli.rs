use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pseudoboson")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    bin(args).status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn passing_runs_exit_zero_with_schema() {
    let out = bin(&["dho-check", "-q"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["schema"], "pseudoboson-report/1");
    assert_eq!(report["command"], "dho-check");
    assert_eq!(report["summary"]["ok"], true);
    for key in ["Omega", "omega_plus", "omega_minus", "re1", "re2", "normalizable", "hamiltonian_residual_max"] {
        assert!(report["data"].get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["data"]["normalizable"], false);
}

#[test]
fn failing_check_exits_two() {
    assert_eq!(code(&["gll-roi", "-q", "--nodes", "8", "--n", "1", "--tol", "1e-30"]), 2);
}

#[test]
fn config_errors_exit_three() {
    assert_eq!(code(&["gll-verify", "--k1", "0.5"]), 3);
    assert_eq!(code(&["gll-verify", "--nodes", "16"]), 3);
    assert_eq!(code(&["dho-check", "--gamma", "5"]), 3);
    assert_eq!(code(&["gll-verify", "--config", "/nonexistent/config.json"]), 3);
    assert_eq!(code(&["gll-verify", "--format", "both"]), 3);
    assert_eq!(code(&["frobnicate"]), 3);
    assert_eq!(code(&["--help"]), 0);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"params": {"k1": 0.1, "kappa": 2}}"#).unwrap();
    assert_eq!(code(&["gll-verify", "--config", cfg.to_str().unwrap()]), 3);
    fs::write(&cfg, r#"{"command": "dho-sweep", "params": {"n": 10}}"#).unwrap();
    assert_eq!(code(&["gll-verify", "--config", cfg.to_str().unwrap()]), 3);
}

#[test]
fn reports_are_byte_identical_across_runs_and_executors() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..3).map(|i| dir.path().join(format!("r{i}.json"))).collect();
    let args = ["gll-verify", "-q", "--k1", "0.1", "--k2", "-0.2", "--nmax", "4", "--lmax", "4", "--output"];
    for (i, p) in paths.iter().enumerate() {
        let mut a = args.to_vec();
        a.push(p.to_str().unwrap());
        if i == 2 {
            a.push("--sequential");
        }
        assert_eq!(code(&a), 0);
    }
    let bytes: Vec<_> = paths.iter().map(|p| fs::read(p).unwrap()).collect();
    assert_eq!(bytes[0], bytes[1]);
    assert_eq!(bytes[0], bytes[2]);
}

#[test]
fn config_echo_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let cfg = dir.path().join("cfg.json");
    let second = dir.path().join("second.json");
    assert_eq!(code(&["dho-sweep", "-q", "--n", "50", "--seed", "3", "--output", first.to_str().unwrap()]), 0);
    let echo = read_json(&first)["config"].clone();
    assert_eq!(echo["params"]["n"], 50);
    fs::write(&cfg, serde_json::to_string(&echo).unwrap()).unwrap();
    assert_eq!(code(&["run", "-q", "--config", cfg.to_str().unwrap(), "--output", second.to_str().unwrap()]), 0);
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"params": {"k1": 0.1, "k2": 0.1, "nmax": 2, "lmax": 2}}"#).unwrap();
    let out = bin(&["gll-verify", "-q", "--config", cfg.to_str().unwrap(), "--k2", "-0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["config"]["params"]["k1"], 0.1);
    assert_eq!(report["config"]["params"]["k2"], -0.25);
    assert_eq!(report["config"]["params"]["nmax"], 2);
}

#[test]
fn csv_gram_export() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("gram");
    let args =
        ["gll-verify", "-q", "--nmax", "1", "--lmax", "1", "--format", "both", "--output", base.to_str().unwrap()];
    assert_eq!(code(&args), 0);
    assert!(base.with_extension("json").exists());
    let csv = fs::read_to_string(base.with_extension("csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][1..], ["0.0", "0.1", "1.0", "1.1"]);
    assert_eq!(rows[3][0], "1.0");
    assert!(rows[1][1].starts_with("1.0") || rows[1][1].starts_with("0.99"), "{}", rows[1][1]);
    assert!(rows[1..].iter().flat_map(|r| &r[1..]).all(|c| c.ends_with('j') && c.contains(['+', '-'])));
}

#[test]
fn timing_is_opt_in() {
    let plain = bin(&["dho-sweep", "-q", "--n", "5"]);
    assert!(!String::from_utf8_lossy(&plain.stdout).contains("wall_time_ms"));
    let timed = bin(&["dho-sweep", "-q", "--n", "5", "--timing"]);
    let report: Value = serde_json::from_slice(&timed.stdout).unwrap();
    assert!(report["wall_time_ms"].as_f64().unwrap() >= 0.0);
}
