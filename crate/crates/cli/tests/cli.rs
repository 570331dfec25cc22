use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn entx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("entx-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn trajectory_csv_and_sidecar() {
    let dir = scratch("trajectory");
    let path = dir.join("traj.csv");
    let out = entx(&["trajectory", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());

    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,P,concurrence,negativity,invertible"));
    assert_eq!(lines.next(), Some("0.0,1.0,1.0,0.5,true"));

    // first zero of P sits near t = 8.24 for gamma0 = 1, lambda = 0.1
    let zero: Vec<&str> = lines
        .map(|l| l.split(',').collect::<Vec<_>>())
        .find(|cols| cols[4] == "false")
        .expect("a non-invertible row")
        .into_iter()
        .collect();
    let t: f64 = zero[0].parse().unwrap();
    let p: f64 = zero[1].parse().unwrap();
    assert!((t - 8.242).abs() < 1e-3, "t = {t}");
    assert!(p <= 1e-12);
    assert_eq!(zero[2], "0.0");

    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("traj.json")).unwrap()).unwrap();
    assert_eq!(meta["metadata"]["command"], "trajectory");
    assert_eq!(meta["metadata"]["config"]["t_steps"], 400);
    let pairs = meta["exceeding_pairs"].as_array().unwrap();
    assert!(!pairs.is_empty());
    for pair in pairs {
        assert!(f(&pair["t_i"]) < f(&pair["t_f"]));
        assert!(f(&pair["concurrence_f"]) >= 0.01);
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["scan", "--grid", "3", "--ea-samples", "32", "--restarts", "2", "--seed", "11"];
    let a = entx(&args);
    let b = entx(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let p1 = ["procedure1", "--t-max", "20", "--format", "json", "--seed", "3"];
    assert_eq!(entx(&p1).stdout, entx(&p1).stdout);
}

#[test]
fn out_of_range_parameter_exits_one_naming_the_flag() {
    let out = entx(&["procedure2", "--gamma", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--gamma"));

    let out = entx(&["scan", "--grid", "1x4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--grid"));

    let out = entx(&["trajectory", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn non_invertible_channel_exits_two_with_structured_error() {
    let out = entx(&["procedure2", "--gamma", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    assert_eq!(err["error"]["kind"], "NonInvertible");
    assert!(out.stdout.is_empty());
}

#[test]
fn procedure2_at_zero_damping_is_exact() {
    let v = stdout_json(&entx(&["procedure2", "--gamma", "0", "--n", "0.3"]));
    for key in ["lhs_rhs", "lhs_dprime", "rhs_dprime", "prime_vs_kraus"] {
        assert!(f(&v["residuals"][key]) <= 1e-12, "{key}");
    }
    assert!((f(&v["rho_ab_prime"]["report"]["negativity"]) - 0.5).abs() < 1e-12);
}

#[test]
fn procedure2_kills_then_revives_negativity() {
    let v = stdout_json(&entx(&["procedure2", "--gamma", "0.75", "--n", "0.5"]));
    assert_eq!(v["entanglement_breaking"]["breaking"], false);
    assert_eq!(v["entanglement_annihilating"]["verdict"], "annihilating");
    assert_eq!(f(&v["rho_ab_prime"]["report"]["negativity"]), 0.0);
    assert!(f(&v["rho_ab_dprime"]["report"]["negativity"]) > 1e-3);
    assert!(f(&v["residuals"]["lhs_rhs"]) < 1e-9);
    assert_eq!(v["audit"]["passed"], true);
}

#[test]
fn small_scan_classes() {
    let out = entx(&["scan", "--grid", "3", "--ea-samples", "64", "--restarts", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    for row in &rows {
        let gamma: f64 = row[0].parse().unwrap();
        if gamma == 1.0 {
            assert_eq!(row[2], "NONINVERTIBLE");
        } else if gamma == 0.0 {
            assert_eq!(row[2], "NOT_EA");
        }
    }
}

#[test]
fn verify_passes_and_detects_tampering() {
    let v = stdout_json(&entx(&["verify"]));
    assert_eq!(v["passed"], true);
    assert!(v["groups"].as_array().unwrap().len() >= 10);

    // zero slack rejects round-off negative eigenvalues
    let out = entx(&["verify", "--psd-slack", "0"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("states.validity"));
}

#[test]
fn flags_override_config_file() {
    let dir = scratch("config");
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "gamma = 0.3\nn = 0.2\nseed = 7\n").unwrap();
    let v = stdout_json(&entx(&["--config", cfg.to_str().unwrap(), "procedure2", "--gamma", "0.75"]));
    let echoed = &v["metadata"]["config"];
    assert_eq!(v["metadata"]["tool"], "entx");
    assert_eq!(echoed["gamma"], 0.75);
    assert_eq!(echoed["n"], 0.2);
    assert_eq!(echoed["seed"], 7);
    assert_eq!(echoed["ea_samples"], 500);

    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "bogus = 1\n").unwrap();
    let out = entx(&["--config", bad.to_str().unwrap(), "scan"]);
    assert_eq!(out.status.code(), Some(1));
}
