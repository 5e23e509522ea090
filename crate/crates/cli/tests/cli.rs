//! End-to-end runs of the binary: output formats, exit codes, determinism.

use std::io::Write;
use std::process::{Command, Output};

const DOUBLE_WELL: &str = "0,0,-1,0,0.25";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_szego-tube"))
        .args(args)
        .env_remove("SZEGO_TUBE_TOL")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn analyze_reports_gap_structure() {
    let v = json_of(&run(&["analyze", "--poly", DOUBLE_WELL, "--reproducible"]));
    assert_eq!(v["degree"], 4);
    assert_eq!(v["n"], 2);
    assert_eq!(v["convex"], false);
    assert_eq!(v["gap_count"], 1);
    assert_eq!(v["gap_count_within_bound"], true);
    let gap = &v["envelope"]["gaps"][0];
    assert!((gap["sigma"].as_f64().unwrap() + 2f64.sqrt()).abs() < 1e-6);
    assert!((gap["lambda"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-6);
    assert!(v.get("timestamp").is_none());
}

#[test]
fn analyze_without_reproducible_has_timestamp() {
    let v = json_of(&run(&["analyze", "--poly", DOUBLE_WELL]));
    assert!(v["timestamp"].as_u64().is_some());
}

#[test]
fn reproducible_reruns_are_byte_identical() {
    let a = run(&["analyze", "--poly", DOUBLE_WELL, "--reproducible"]);
    let b = run(&["analyze", "--poly", DOUBLE_WELL, "--reproducible"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn lambda_at_tie_returns_largest_minimizer() {
    let v = json_of(&run(&["lambda", "--poly", DOUBLE_WELL, "--eta", "0"]));
    assert!((v["lambda"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-9);
    assert!((v["sigma"].as_f64().unwrap() + 2f64.sqrt()).abs() < 1e-9);
    assert_eq!(v["minimizers"].as_array().unwrap().len(), 2);
    assert!((v["bstar"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn classify_diagonal_sigma_point() {
    let v = json_of(&run(&["classify", "--poly", DOUBLE_WELL, "--x", "2", "--r", "2"]));
    assert_eq!(v["in_sigma"], true);
    assert_eq!(v["on_diagonal"], true);
    assert_eq!(v["location"], "boundary");
    assert!(v["margin"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn margin_positive_off_sigma() {
    let v = json_of(&run(&["margin", "--poly", DOUBLE_WELL, "--x", "0.2", "--r", "0.3"]));
    assert_eq!(v["in_sigma"], false);
    assert!(v["margin"].as_f64().unwrap() > 0.0);
}

#[test]
fn nvalue_emits_integral_diagnostics() {
    let v = json_of(&run(&["nvalue", "--poly", DOUBLE_WELL, "--eta", "2", "--tau", "5"]));
    assert_eq!(v["converged"], true);
    assert!(v["I"].as_f64().unwrap() > 0.0);
    assert!(v["err"].as_f64().unwrap() < 1e-4);
    assert!(v["log_N"].as_f64().is_some());
}

#[test]
fn kernel_abs_scalar_value() {
    let v = json_of(&run(&[
        "kernel", "--poly", DOUBLE_WELL, "--x", "0", "--r", "0", "--abs", "--tol", "1e-4",
    ]));
    assert_eq!(v["status"], "converged");
    assert!(v["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn kernel_complex_value_is_pair() {
    let v = json_of(&run(&[
        "kernel", "--poly", "0,0,0,0,0.25", "--x", "0.5", "--r", "-0.5", "--t", "0.2",
        "--tol", "1e-4",
    ]));
    assert_eq!(v["status"], "converged");
    let pair = v["value"].as_array().unwrap();
    assert_eq!(pair.len(), 2);
    assert!(pair[1].as_f64().unwrap().abs() > 0.0);
}

#[test]
fn kernel_diverged_on_sigma() {
    let v = json_of(&run(&[
        "kernel", "--poly", DOUBLE_WELL, "--x", "1.4142135623730951",
        "--r", "-1.4142135623730951", "--abs",
    ]));
    assert_eq!(v["status"], "diverged");
    assert!(v["value"].is_null());
}

#[test]
fn sweep_lambda_csv_shape() {
    let out = run(&["sweep", "--poly", DOUBLE_WELL, "--quantity", "lambda", "--grid", "-2:2:5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eta,lambda,sigma,bstar,error");
    assert_eq!(lines.len(), 6);
    // eta = 0 row: lambda = sqrt(2), sigma = -sqrt(2)
    let mid: Vec<&str> = lines[3].split(',').collect();
    assert!((mid[1].parse::<f64>().unwrap() - 2f64.sqrt()).abs() < 1e-9);
    assert!((mid[2].parse::<f64>().unwrap() + 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn sweep_envelope_bridges_gap() {
    let out = run(&["sweep", "--poly", DOUBLE_WELL, "--quantity", "envelope", "--grid", "-1:1:3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "u,b,biconjugate,error");
    let row: Vec<&str> = lines[2].split(',').collect(); // u = 0
    assert!((row[2].parse::<f64>().unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn probe_csv_has_growth_ratios() {
    let out = run(&[
        "probe", "--poly", DOUBLE_WELL, "--x", "0", "--r", "0", "--delta0", "0.2",
        "--halvings", "2", "--tol", "1e-4",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "delta,value,ratio");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].ends_with(','));
    let last: Vec<&str> = lines[3].split(',').collect();
    // finite-limit point: ratios near 1
    assert!((last[2].parse::<f64>().unwrap() - 1.0).abs() < 0.2);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "envelope", "--poly", DOUBLE_WELL, "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["gaps"].as_array().unwrap().len(), 1);
}

#[test]
fn config_file_sets_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("conf");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "# comment line ignored").unwrap();
    writeln!(f, "tol = 1e-5").unwrap();
    writeln!(f, "budget = 1000000").unwrap();
    drop(f);
    let out = run(&[
        "nvalue", "--poly", DOUBLE_WELL, "--eta", "1", "--tau", "1",
        "--config", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let bad = dir.path().join("bad");
    std::fs::write(&bad, "no_such_key = 1\n").unwrap();
    let out = run(&[
        "nvalue", "--poly", DOUBLE_WELL, "--eta", "1", "--tau", "1",
        "--config", bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn env_var_overrides_default_tolerance() {
    let out = Command::new(env!("CARGO_BIN_EXE_szego-tube"))
        .args(["nvalue", "--poly", DOUBLE_WELL, "--eta", "1", "--tau", "1"])
        .env("SZEGO_TUBE_TOL", "1e-3")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["err"].as_f64().unwrap() < 1e-2);
}

#[test]
fn validation_errors_exit_2_with_structured_stderr() {
    // odd degree fails domain validation
    let out = run(&["analyze", "--poly", "0,1,0,1"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "validation");

    // unparseable coefficients
    let out = run(&["analyze", "--poly", "1,two,3"]);
    assert_eq!(out.status.code(), Some(2));

    // missing polynomial
    let out = run(&["analyze"]);
    assert_eq!(out.status.code(), Some(2));

    // bad grid spec
    let out = run(&["sweep", "--poly", DOUBLE_WELL, "--quantity", "lambda", "--grid", "5:1:9"]);
    assert_eq!(out.status.code(), Some(2));

    // unknown sweep quantity
    let out = run(&["sweep", "--poly", DOUBLE_WELL, "--quantity", "zeta", "--grid", "0:1:3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    // a tiny budget cannot converge the kernel integral
    let out = run(&[
        "kernel", "--poly", DOUBLE_WELL, "--x", "0", "--r", "0", "--abs", "--budget", "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "numerical");
}

#[test]
fn sweep_margin_flags_sigma_rows() {
    let out = run(&["sweep", "--poly", DOUBLE_WELL, "--quantity", "margin", "--grid", "0:2:3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,r,margin,in_sigma,error");
    // x = r = 0 and x = r = 1 lie inside the gap: positive margin, off sigma
    for row in [1, 2] {
        let cols: Vec<&str> = lines[row].split(',').collect();
        assert!(cols[2].parse::<f64>().unwrap() > 0.0);
        assert_eq!(cols[3], "false");
    }
    // x = r = 2 is in the minimizer range: margin 0, in sigma
    let last: Vec<&str> = lines[3].split(',').collect();
    assert!(last[2].parse::<f64>().unwrap().abs() < 1e-12);
    assert_eq!(last[3], "true");
}
