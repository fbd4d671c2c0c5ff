use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn pooldesign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pooldesign"))
        .args(args)
        .env_remove("POOLDESIGN_CONFIG")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = pooldesign(&full);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn optimal_examples() {
    assert_eq!(json(&["optimal", "--p", "0.01"])["k_opt"], 11);
    let v = json(&["optimal", "--p", "0.5"]);
    assert_eq!(v["k_opt"], 1);
    assert_eq!(v["expected_tests"], 1.0);
    let v = json(&["optimal", "--p", "0.02"]);
    assert_eq!(v["k_opt"], 8);
    assert!((v["range_low"].as_f64().unwrap() - 0.0157).abs() < 1e-4);
    assert!((v["range_high"].as_f64().unwrap() - 0.0206).abs() < 1e-4);
}

#[test]
fn minimax_examples() {
    assert_eq!(json(&["minimax"])["k_minimax"], 8);
    assert_eq!(json(&["minimax", "--upper-bound", "0.15"])["k_minimax"], 8);
    // the reference table has 64 here; 65 has the strictly smaller worst-case regret
    assert_eq!(
        json(&["minimax", "--upper-bound", "0.001"])["k_minimax"],
        65
    );
    let grid = json(&["minimax", "--method", "grid", "--grid-step", "1e-5"]);
    assert_eq!(grid["k_minimax"], 8);
    assert_eq!(grid["grid_step"], 1e-5);
}

#[test]
fn bayes_examples() {
    assert_eq!(json(&["bayes", "--prior", "jeffreys"])["k_opt"], 13);
    assert_eq!(
        json(&["bayes", "--prior", "uniform", "--upper-bound", "0.01"])["k_opt"],
        15
    );
    assert_eq!(
        json(&["bayes", "--prior", "jeffreys", "--upper-bound", "0.05"])["k_opt"],
        9
    );
    let beta = json(&["bayes", "--prior", "beta", "--a", "0.5", "--b", "0.5"]);
    assert_eq!(beta["k_opt"], 13);
}

#[test]
fn range_command() {
    let v = json(&["range", "--k", "1"]);
    assert_eq!(v["p_high"], 1.0);
    let v = json(&["range", "--k", "8"]);
    assert!((v["p_low"].as_f64().unwrap() - 0.015_772_625_168_187_294).abs() < 1e-15);
}

#[test]
fn golden_checks() {
    assert!(pooldesign(&["table", "--table", "1", "--check"])
        .status
        .success());
    assert!(pooldesign(&["table", "--table", "5", "--check"])
        .status
        .success());
}

#[test]
fn golden_mismatch_exits_4_and_names_cells() {
    let out = pooldesign(&["table", "--table", "3", "--check"]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("k**_U[2] expected 64 got 65"), "{err}");
}

#[test]
fn table_three_csv_shape() {
    let out = pooldesign(&["table", "--table", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4, "header plus three data rows");
    assert!(lines[0].starts_with("U,0.0001,"));
    for line in &lines {
        assert_eq!(
            line.split(',').count(),
            10,
            "label plus nine columns: {line}"
        );
    }
    assert!(!text.contains('\r'));
    assert_eq!(lines[2], "k*_I_U,142,64,45,21,15,7,5,5,4");
}

#[test]
fn json_round_trips_and_is_deterministic() {
    for args in [
        vec!["table", "--table", "1", "--format", "json"],
        vec!["table", "--table", "4", "--format", "json"],
        vec!["minimax", "--upper-bound", "0.3", "--format", "json"],
    ] {
        let first = pooldesign(&args).stdout;
        let second = pooldesign(&args).stdout;
        assert_eq!(first, second, "{args:?}");
        let parsed: Value = serde_json::from_slice(&first).unwrap();
        let mut again = serde_json::to_vec(&parsed).unwrap();
        again.push(b'\n');
        assert_eq!(
            String::from_utf8(again).unwrap(),
            String::from_utf8(first).unwrap(),
            "{args:?}"
        );
    }
}

#[test]
fn invalid_input_exits_2_with_one_line() {
    for args in [
        vec!["optimal", "--p", "1.5"],
        vec!["range", "--k", "2"],
        vec!["minimax", "--upper-bound", "0"],
        vec!["bayes", "--prior", "beta", "--a", "1"],
        vec!["bayes", "--prior", "beta", "--a", "-1", "--b", "1"],
        vec!["minimax", "--quad-tol", "-1"],
    ] {
        let out = pooldesign(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
    }
    let out = pooldesign(&["table", "--table", "6"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_errors_are_objects() {
    let out = pooldesign(&["optimal", "--p", "0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "invalid_input");
    assert_eq!(v["error"]["exit_code"], 2);
}

#[test]
fn numerical_failure_exits_3() {
    let out = pooldesign(&[
        "bayes",
        "--prior",
        "jeffreys",
        "--upper-bound",
        "0.0001",
        "--patience",
        "1",
        "--quad-tol",
        "1e-300",
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn config_file_sets_defaults_and_flags_win() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# defaults\noutput = csv\nk_scan_patience = 12").unwrap();
    let path = file.path().to_str().unwrap();

    let out = pooldesign(&["--config", path, "optimal", "--p", "0.01"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("p,k_opt,"));

    let out = pooldesign(&[
        "--config", path, "optimal", "--p", "0.01", "--format", "json",
    ]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["k_opt"], 11);

    let out = Command::new(env!("CARGO_BIN_EXE_pooldesign"))
        .args(["optimal", "--p", "0.01"])
        .env("POOLDESIGN_CONFIG", path)
        .output()
        .unwrap();
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("p,k_opt,"));
}

#[test]
fn bad_config_file_exits_2() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "colour = blue").unwrap();
    let out = pooldesign(&["--config", file.path().to_str().unwrap(), "minimax"]);
    assert_eq!(out.status.code(), Some(2));
}
