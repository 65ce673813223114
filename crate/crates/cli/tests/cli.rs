use std::fs;

use assert_cmd::Command;
use serde_json::Value;

fn g2lab() -> Command {
    let mut cmd = Command::cargo_bin("g2lab").unwrap();
    cmd.env_remove("G2LAB_ORACLE_DIM_MAX");
    cmd
}

fn stdout_of(args: &[&str]) -> String {
    let out = g2lab().args(args).assert().success().get_output().stdout.clone();
    String::from_utf8(out).unwrap()
}

fn csv_field(csv: &str, column: &str) -> f64 {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == column).unwrap();
    row[i].parse().unwrap()
}

#[test]
fn eval_fig1_zero_lag() {
    let out = stdout_of(&["eval", "--nbar", "0.1", "--r", "0.3", "--alpha", "0.8", "--theta-minus-2phi", "0", "--omega-tau", "0"]);
    assert!(out.starts_with("omega_tau,tau_over_t,g2,mean_n\n"));
    assert!((csv_field(&out, "g2") - 0.961).abs() < 1e-3);
}

#[test]
fn eval_coherent_state_on_time_ratio_axis() {
    let out = stdout_of(&["eval", "--nbar", "0", "--r", "0", "--alpha", "1", "--tau-over-t", "5"]);
    assert_eq!(csv_field(&out, "g2"), 1.0);
}

#[test]
fn eval_squeezed_thermal_json() {
    let out = stdout_of(&["eval", "--nbar", "1", "--r", "0.2", "--alpha", "0", "--omega-tau", "0", "--format", "json"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["g2"].as_f64().unwrap() - 2.301).abs() < 1e-3);
}

#[test]
fn csv_numbers_carry_fifteen_digits() {
    let out = stdout_of(&["eval", "--nbar", "0.1", "--r", "0.3", "--alpha", "0.8", "--omega-tau", "0.25"]);
    let row = out.lines().nth(1).unwrap();
    for cell in row.split(',') {
        let mantissa = cell.split('e').next().unwrap().replace(['-', '.'], "");
        assert!(mantissa.len() >= 12, "{cell}");
    }
}

#[test]
fn theta_and_phi_reduce_to_offset() {
    let a = stdout_of(&["eval", "--nbar", "0.2", "--r", "0.4", "--alpha", "0.7", "--theta", "1.0", "--phi", "0.3", "--omega-tau", "0.6"]);
    let b = stdout_of(&["eval", "--nbar", "0.2", "--r", "0.4", "--alpha", "0.7", "--theta-minus-2phi", "0.4", "--omega-tau", "0.6"]);
    assert!((csv_field(&a, "g2") - csv_field(&b, "g2")).abs() < 1e-13);
}

#[test]
fn validation_failures_exit_two() {
    g2lab()
        .args(["eval", "--nbar", "-1", "--r", "0.2", "--omega-tau", "0"])
        .assert()
        .code(2)
        .stderr(predicates::str::contains("nbar"));
    g2lab().args(["eval", "--nbar", "0", "--r", "0", "--alpha", "1", "--omega-tau", "1"]).assert().code(2);
    g2lab().args(["figure", "fig6"]).assert().code(2);
    g2lab()
        .args(["eval", "--nbar", "0", "--r", "0.1", "--theta", "1", "--theta-minus-2phi", "0", "--omega-tau", "0"])
        .assert()
        .code(2);
}

#[test]
fn sweep_is_deterministic() {
    let args = ["sweep", "--nbar", "0.1", "--r", "0.3", "--alpha", "0.8", "--stop", "3", "--points", "50"];
    let a = stdout_of(&args);
    let b = stdout_of(&args);
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 51);
}

#[test]
fn sweep_time_ratio_axis_for_unsqueezed_light() {
    let out = stdout_of(&["sweep", "--nbar", "1", "--r", "0", "--alpha", "1", "--axis", "tau-over-t", "--stop", "10", "--points", "11"]);
    let first: Vec<f64> = out.lines().nth(1).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert!((first[2] - 1.75).abs() < 1e-12);
    g2lab().args(["sweep", "--nbar", "1", "--r", "0", "--alpha", "1", "--stop", "1"]).assert().code(2);
}

#[test]
fn figure_writes_curve_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig1.csv");
    g2lab().args(["figure", "fig1", "--output", csv.to_str().unwrap()]).assert().success();
    let body = fs::read_to_string(&csv).unwrap();
    assert!(body.starts_with("axis_value,g2\n"));
    assert_eq!(body.lines().count(), 1001);
    let side: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("fig1.checkpoints.json")).unwrap()).unwrap();
    assert_eq!(side["all_pass"], Value::Bool(true));
    let checkpoints = side["checkpoints"].as_array().unwrap();
    let min = checkpoints.iter().find(|c| c["name"] == "min_omega_tau").unwrap();
    assert!((min["value"].as_f64().unwrap() - 0.0300).abs() < 5e-4);
    assert_eq!(min["tolerance"].as_f64().unwrap(), 5e-4);
}

#[test]
fn figure_three_has_both_curves() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig3.csv");
    g2lab().args(["figure", "fig3", "--output", csv.to_str().unwrap()]).assert().success();
    let body = fs::read_to_string(&csv).unwrap();
    assert!((csv_field(&body, "g2_red") - 1.750).abs() < 1e-3);
    assert!((csv_field(&body, "g2_blue") - 1.615).abs() < 1e-3);
}

#[test]
fn figure_five_crossing() {
    let out = g2lab().args(["figure", "fig5"]).assert().success().get_output().stderr.clone();
    let side: Value = serde_json::from_slice(&out).unwrap();
    let c = side["checkpoints"].as_array().unwrap().iter().find(|c| c["name"] == "crossing_g2zero_omega_tau").unwrap().clone();
    assert!((c["value"].as_f64().unwrap() - 0.794).abs() < 5e-3);
}

#[test]
fn figure_checkpoint_failure_exits_nonzero() {
    g2lab().args(["figure", "fig1", "--form", "exact"]).assert().code(1);
}

#[test]
fn classify_reports_violations() {
    let out = stdout_of(&["classify", "--nbar", "0.1", "--r", "0.3", "--alpha", "0.8", "--form", "legacy", "--format", "json"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["sub_poissonian"], Value::Bool(true));
    assert_eq!(v["classical"], Value::Bool(false));
    let out = stdout_of(&["classify", "--nbar", "1", "--r", "0", "--alpha", "1", "--max-lag", "10"]);
    assert!(!out.contains("violation"));
}

#[test]
fn optimize_alpha_vacuum() {
    let out = stdout_of(&["optimize-alpha", "--nbar", "0", "--r", "0.5"]);
    let expected = 0.5 * (1f64.exp().powi(2) - 1.0).sqrt();
    assert!((csv_field(&out, "alpha_mag") - expected).abs() < 1e-10);
}

#[test]
fn oracle_check_exit_codes() {
    g2lab().args(["oracle-check", "--nbar", "0.1", "--r", "0.3", "--alpha", "0.8", "--omega-tau", "0.5"]).assert().code(0);
    g2lab().args(["oracle-check", "--nbar", "0.5", "--r", "0.4", "--alpha", "1", "--omega-tau", "1"]).assert().code(0);
    g2lab()
        .args(["oracle-check", "--nbar", "0.1", "--r", "5", "--alpha", "0.8", "--omega-tau", "0.5"])
        .assert()
        .code(3)
        .stderr(predicates::str::contains("envelope"));
}

#[test]
fn oracle_cap_from_environment() {
    g2lab()
        .env("G2LAB_ORACLE_DIM_MAX", "32")
        .args(["oracle-check", "--nbar", "0.5", "--r", "0.4", "--alpha", "1", "--omega-tau", "1"])
        .assert()
        .code(3);
}
