use serde_json::Value;
use std::process::{Command, Output};

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_theta-torus"));
    cmd.args(args).env_remove("THETA_TORUS_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn theta_value(v: &Value) -> (f64, f64) {
    let z = &v["value"]["value"];
    (z[0].as_f64().unwrap(), z[1].as_f64().unwrap())
}

#[test]
fn theta_at_origin() {
    let v = json(&["theta", "--z", "0", "--tau", "i"]);
    let (re, im) = theta_value(&v);
    assert!((re - 1.086434811213308).abs() < 1e-12 && im.abs() < 1e-14);
    assert!(v["value"]["tail_bound"].as_f64().unwrap() <= 1e-12);
    let plain = stdout(&run(&["theta", "--z", "0", "--tau", "i"]));
    assert!(plain.starts_with("value: 1.08643481121"), "{plain}");
}

#[test]
fn theta_with_characteristics_matches_shifted_argument() {
    let (a, _) = theta_value(&json(&["theta", "--a", "0", "--b", "0.5", "--z", "0", "--tau", "i"]));
    let (b, _) = theta_value(&json(&["theta", "--z", "0.5", "--tau", "i"]));
    assert!((a - b).abs() < 1e-14);
    assert!((a - 2f64.powf(-0.25) * 1.086434811213308).abs() < 1e-12);
}

#[test]
fn theta_vanishes_at_the_half_period() {
    let v = json(&["theta", "--z", "0.5+0.5i", "--tau", "i"]);
    let (re, im) = theta_value(&v);
    let bound = v["value"]["tail_bound"].as_f64().unwrap() + v["value"]["rounding_bound"].as_f64().unwrap();
    assert!(re.hypot(im) <= bound, "|theta| = {} bound {bound}", re.hypot(im));
}

#[test]
fn theta_usage_errors_exit_two() {
    assert_eq!(code(&run(&["theta", "--z", "zero", "--tau", "i"])), 2);
    assert_eq!(code(&run(&["theta", "--z", "0", "--tau", "-i"])), 2);
    assert_eq!(code(&run(&["theta", "--z", "0"])), 2);
    assert_eq!(code(&run(&["theta", "--z", "0", "--tau", "i", "--tol", "-1"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
}

#[test]
fn tolerance_env_var_is_honoured() {
    let terms = |env: &[(&str, &str)]| -> u64 {
        let out = run_env(&["--format", "json", "theta", "--z", "0", "--tau", "0.01i"], env);
        assert_eq!(code(&out), 0);
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        v["value"]["terms_used"].as_u64().unwrap()
    };
    assert!(terms(&[("THETA_TORUS_TOL", "1e-3")]) < terms(&[]));
    let out = run_env(&["theta", "--z", "0", "--tau", "i"], &[("THETA_TORUS_TOL", "tiny")]);
    assert_eq!(code(&out), 2);
    let out = run_env(&["verify", "classical"], &[("THETA_TORUS_TOL", "1e-30")]);
    assert_eq!(code(&out), 1);
}

#[test]
fn verify_suites_pass() {
    for args in [&["verify", "bracket", "--range", "4"][..], &["verify", "theta3", "--q", "2", "4", "6"], &["verify", "classical"],
        &["verify", "partition"], &["verify", "all"]]
    {
        let out = run(args);
        assert_eq!(code(&out), 0, "{args:?}: {}", stdout(&out));
    }
    let v = json(&["verify", "all"]);
    assert_eq!(v["passed"], Value::Bool(true));
    for key in ["classical", "bracket", "theta3", "partition"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn verify_failure_lists_identity_and_sample() {
    let out = run(&["--tol", "1e-30", "verify", "theta3", "--q", "2"]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    let fail = text.lines().find(|l| l.starts_with("FAIL")).expect("a failing line");
    assert!(fail.contains("trace of e^2") && fail.contains(" at t=("), "{fail}");
}

#[test]
fn verify_rejects_unknown_suite_and_odd_q() {
    assert_eq!(code(&run(&["verify", "everything"])), 2);
    assert_eq!(code(&run(&["verify", "theta3", "--q", "3"])), 2);
}

#[test]
fn norm_table_reproduces_rows() {
    let out = run(&["norm-table", "--q", "2", "7", "12"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("q,norm,phi,gap,phi_kind"));
    let rows = csv_rows(&text);
    let get = |r: &Vec<String>, k: usize| r[k].parse::<f64>().unwrap();
    assert_eq!(rows[0][0], "2");
    assert!((get(&rows[0], 1) - 2.82842).abs() < 1e-5 && (get(&rows[0], 2) - 2.82842).abs() < 1e-5);
    assert_eq!(rows[1][4], "phi1");
    assert!((get(&rows[1], 1) - 3.20330).abs() < 1e-5 && (get(&rows[1], 2) - 3.19690).abs() < 1e-5);
    for r in &rows {
        assert!(get(r, 3) >= -1e-9, "{r:?}");
    }
    assert_eq!(code(&run(&["norm-table", "--q", "1"])), 2);
}

#[test]
fn norm_table_other_lambda_has_no_bound() {
    let rows = csv_rows(&stdout(&run(&["norm-table", "--q", "3", "--lambda", "1"])));
    assert_eq!(rows[0][2], "");
    assert!(rows[0][1].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn outputs_are_deterministic() {
    for args in [&["norm-table", "--q", "2", "5", "13"][..], &["--format", "json", "norm-table", "--q", "3", "4"], &["phi-curve", "--points", "50"],
        &["--format", "json", "verify", "theta3"], &["--format", "csv", "projection", "--q", "3"]]
    {
        let a = run(args);
        let b = run(args);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("theta-torus-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table.csv");
    let out = run(&["--out", path.to_str().unwrap(), "norm-table", "--q", "2"]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), run(&["norm-table", "--q", "2"]).stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn phi0_curve_matches_figure_window() {
    let out = run(&["phi-curve", "--parity", "even", "--from", "0.01", "--to", "0.5", "--points", "500"]);
    assert_eq!(code(&out), 0);
    let samples: Vec<(f64, f64)> =
        csv_rows(&stdout(&out)).iter().map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap())).collect();
    assert_eq!(samples.len(), 500);
    for &(x, y) in &samples {
        assert!((2.7..=4.0).contains(&y), "phi0({x}) = {y}");
    }
    for w in samples.windows(2) {
        assert!((w[1].1 - w[0].1).abs() < 0.1);
    }
    let (x, y) = *samples.last().unwrap();
    assert_eq!(x, 0.5);
    assert!((y - 2.82842).abs() < 1e-5);
}

#[test]
fn phi1_curve_and_range_checks() {
    let out = run(&["phi-curve", "--parity", "odd", "--points", "100"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| r[1].parse::<f64>().unwrap().is_finite()));
    assert_eq!(code(&run(&["phi-curve", "--parity", "odd", "--to", "0.4"])), 2);
    assert_eq!(code(&run(&["phi-curve", "--from", "0", "--to", "0.5"])), 2);
    assert_eq!(code(&run(&["phi-curve", "--points", "1"])), 2);
}

#[test]
fn projection_residuals_are_small() {
    let out = run(&["projection", "--q", "2"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let v = json(&["projection", "--q", "3", "--grid", "4"]);
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["checks"].as_array().unwrap().len(), 16);
    for key in ["max_idempotency", "max_trace_deviation"] {
        assert!(v[key].as_f64().unwrap() <= 1e-9, "{key}");
    }
    assert!(v["max_self_adjointness"].as_f64().unwrap() <= 1e-12);
    assert_eq!(code(&run(&["projection", "--q", "0"])), 2);
    assert_eq!(code(&run(&["projection", "--q", "2", "--grid", "1"])), 2);
}

#[test]
fn witness_expression_evaluates_to_target() {
    let out = run(&["witness", "--n", "3", "--m", "0"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().last(), Some("c3_0"));
    assert!(text.contains("c1_0 = u + u^-1 + v + v^-1;"));
    let v = json(&["witness", "--n", "2", "--m", "3"]);
    assert_eq!(v["verified"], Value::Bool(true));
    assert_eq!(code(&run(&["witness", "--n", "-1", "--m", "0"])), 2);
}

#[test]
fn criterion_reports() {
    let v = json(&["criterion", "--p", "1", "--q", "2", "--alpha", "0.6"]);
    assert_eq!(v["verdict"], "invertible-criterion-met");
    assert!((v["trace"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    let v = json(&["criterion", "--alpha", "0.3"]);
    assert_eq!(v["verdict"], "invertible-criterion-met");
    let v = json(&["criterion", "--p", "1", "--q", "2", "--alpha", "0.5"]);
    assert_eq!(v["verdict"], "not-applicable");
    assert_eq!(code(&run(&["criterion", "--p", "1", "--alpha", "0.6"])), 2);
    assert_eq!(code(&run(&["criterion"])), 2);
}
