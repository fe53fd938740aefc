//! End-to-end tests of the command-line front end: every documented exit
//! code, the table formats, and the file formats.

use clap::Parser;
use serde_json::Value;

use ssp_lab::cli::{self, Cli};
use ssp_lab::io;
use ssp_lab::model::AnySsp;
use ssp_lab::rollout::greedy_policy;
use ssp_lab::scenarios::{sharpness_chain, SharpnessSpec};

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = cli::execute(Cli::parse_from(args), &mut out);
    (code, String::from_utf8(out).expect("utf-8 output"))
}

fn write_temp(dir: &tempfile::TempDir, name: &str, contents: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path.display().to_string()
}

const BROKEN_MODEL: &str = r#"{
  "n_states": 2,
  "terminal": 1,
  "form": "kernel",
  "actions": [["go"], ["stop"]],
  "transitions": [
    {"state": 0, "action": 0, "row": [[1, 0.95]], "cost": 1.0},
    {"state": 1, "action": 0, "row": [[1, 1.0]], "cost": 0.0}
  ]
}"#;

/// A model whose rollout under `IMPROPER_VALUE` cycles forever on the
/// free self-loop.
const LOOPY_MODEL: &str = r#"{
  "n_states": 2,
  "terminal": 1,
  "form": "kernel",
  "actions": [["stay", "leave"], ["stop"]],
  "transitions": [
    {"state": 0, "action": 0, "row": [[0, 1.0]], "cost": 0.0},
    {"state": 0, "action": 1, "row": [[1, 1.0]], "cost": 1.0},
    {"state": 1, "action": 0, "row": [[1, 1.0]], "cost": 0.0}
  ]
}"#;

const IMPROPER_VALUE: &str = r#"{ "values": [-0.5, 0.0] }"#;

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let inst = sharpness_chain(&SharpnessSpec { m: 3, eps: 0.1 }).unwrap();
    let good = dir.path().join("good.json");
    io::save_model(&AnySsp::Kernel(inst.model.clone()), &good).unwrap();

    let (code, out) = run(&["ssp-lab", "validate", good.to_str().unwrap()]);
    assert_eq!(code, 0, "output: {out}");

    let bad = write_temp(&dir, "bad.json", BROKEN_MODEL);
    let (code, out) = run(&["ssp-lab", "validate", &bad]);
    assert_eq!(code, 1);
    assert!(out.contains("sums to 0.95"), "output: {out}");

    let (code, _) = run(&["ssp-lab", "validate", "/nonexistent/model.json"]);
    assert_eq!(code, 2);
}

#[test]
fn certify_sharpness_reports_gap_and_bound() {
    let (code, out) = run(&[
        "ssp-lab", "certify", "--scenario", "sharpness", "--M", "4", "--eps", "0.1", "--from",
        "0",
    ]);
    assert_eq!(code, 0, "output: {out}");
    let report: Value = serde_json::from_str(&out).unwrap();
    assert!((report["gap"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert!((report["bound_hitting"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(report["expected_tau"].as_f64().unwrap(), 5.0);
}

#[test]
fn certify_min_time_corridor() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_temp(
        &dir,
        "corridor.json",
        r#"{
          "scenario": {
            "kind": "gridworld",
            "width": 21, "height": 1,
            "robot_start": [0, 0], "target": [20, 0],
            "arrival_radius": 0,
            "obstacle_start": [10, 0],
            "obstacle_moves": [["stay", 1.0]],
            "nominal_move": "stay",
            "collision_penalty": 0.0,
            "connectivity": "Four"
          }
        }"#,
    );
    let (code, out) = run(&[
        "ssp-lab", "certify", "--scenario-file", &scenario, "--value-offset", "-0.02",
        "--min-time",
    ]);
    assert_eq!(code, 0, "output: {out}");
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["h_star"].as_f64().unwrap(), 20.0);
    let bound = report["bound_multiplicative"].as_f64().unwrap();
    assert!((bound - 20.0 / 0.96).abs() < 1e-9, "bound {bound}");
}

#[test]
fn certify_refuses_improper_rollout_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_temp(&dir, "loopy.json", LOOPY_MODEL);
    let value = write_temp(&dir, "value.json", IMPROPER_VALUE);
    let (code, out) = run(&[
        "ssp-lab", "certify", "--model", &model, "--value", &value, "--from", "0",
    ]);
    assert_eq!(code, 3, "output: {out}");
    assert!(out.contains("improper"), "output: {out}");
}

#[test]
fn certify_lyapunov_variant() {
    let dir = tempfile::tempdir().unwrap();
    // Lyapunov profile for the sharpness chain under the surrogate
    // rollout: twice the remaining steps.
    let m = 4usize;
    let mut l: Vec<f64> = (0..=m).map(|i| 2.0 * (m + 1 - i) as f64).collect();
    l.push(0.0);
    let l_path = write_temp(
        &dir,
        "lyapunov.json",
        &serde_json::to_string(&serde_json::json!({ "values": l })).unwrap(),
    );
    let (code, out) = run(&[
        "ssp-lab", "certify", "--scenario", "sharpness", "--M", "4", "--eps", "0.1", "--from",
        "0", "--lyapunov", &l_path, "--c", "1.0", "--N", "6", "--local-eps",
    ]);
    assert_eq!(code, 0, "output: {out}");
    let report: Value = serde_json::from_str(&out).unwrap();
    assert!(report["bound_lyapunov"].as_f64().unwrap() >= report["bound_hitting"].as_f64().unwrap());
    assert!(report["bound_uniform_n"].is_number());
    assert!(report["bound_local"].is_number());
}

#[test]
fn sweep_sharpness_ratios_are_in_band() {
    let (code, out) = run(&[
        "ssp-lab", "sweep", "--scenario", "sharpness", "--M-list", "1,4,10,100", "--eps-list",
        "0.1",
    ]);
    assert_eq!(code, 0, "output: {out}");
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "M,eps,gap,expected_tau,bound,ratio");
    for line in lines {
        let ratio: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((0.25..=0.5).contains(&ratio), "ratio {ratio} out of band");
    }
}

#[test]
fn sweep_with_empty_list_prints_header_only() {
    let (code, out) = run(&["ssp-lab", "sweep", "--scenario", "sharpness", "--eps-list", "0.1"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "M,eps,gap,expected_tau,bound,ratio");
}

#[test]
fn sweep_random_has_no_bound_violations() {
    let seeds = (0..100).map(|s| s.to_string()).collect::<Vec<_>>().join(",");
    let (code, out) = run(&[
        "ssp-lab", "sweep", "--random", "--seeds", &seeds, "--n-states", "12", "--eps0", "0.05",
    ]);
    assert_eq!(code, 0, "output: {out}");
    assert_eq!(out.lines().count(), 101);
}

#[test]
fn simulate_covers_exact_cost_and_cross_checks() {
    let (code, out) = run(&[
        "ssp-lab", "simulate", "--scenario", "sharpness", "--M", "10", "--eps", "0.1", "--from",
        "0", "--reps", "20000", "--seed", "7", "--cross-check",
    ]);
    assert_eq!(code, 0, "output: {out}");
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["cross_check_cost_ok"], Value::Bool(true));
    assert_eq!(report["cross_check_tau_ok"], Value::Bool(true));
    assert!((report["mean_cost"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn simulate_cross_checks_random_scenario() {
    let (code, out) = run(&[
        "ssp-lab", "simulate", "--scenario", "random", "--n-states", "10", "--n-actions", "3",
        "--model-seed", "4", "--value-noise", "0.1", "--value-seed", "9", "--reps", "50000",
        "--seed", "3", "--cross-check",
    ]);
    assert_eq!(code, 0, "output: {out}");
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["cross_check_cost_ok"], Value::Bool(true));
    assert_eq!(report["cross_check_tau_ok"], Value::Bool(true));
}

#[test]
fn simulate_rejects_policy_for_wrong_model() {
    let dir = tempfile::tempdir().unwrap();
    let inst = sharpness_chain(&SharpnessSpec { m: 3, eps: 0.1 }).unwrap();
    let (pi, _) = greedy_policy(&inst.model, &inst.surrogate);
    let policy_path = dir.path().join("policy.json");
    io::save_policy(&pi, "not-the-right-hash", &policy_path).unwrap();
    let (code, out) = run(&[
        "ssp-lab", "simulate", "--scenario", "sharpness", "--M", "3", "--eps", "0.1",
        "--policy", policy_path.to_str().unwrap(), "--reps", "10",
    ]);
    assert_eq!(code, 1, "output: {out}");

    // With the correct hash the policy is accepted.
    io::save_policy(&pi, &io::kernel_hash(&inst.model), &policy_path).unwrap();
    let (code, out) = run(&[
        "ssp-lab", "simulate", "--scenario", "sharpness", "--M", "3", "--eps", "0.1",
        "--policy", policy_path.to_str().unwrap(), "--reps", "10", "--cross-check",
    ]);
    assert_eq!(code, 0, "output: {out}");
}

#[test]
fn certify_ce_on_deterministic_disturbance_matches_rollout() {
    let dir = tempfile::tempdir().unwrap();
    let d = ssp_lab::random_disturbance_ssp(&ssp_lab::RandomDisturbanceSpec {
        n_states: 6,
        n_actions: 2,
        n_disturbances: 1,
        cost_range: (0.1, 1.0),
        seed: 5,
    })
    .unwrap();
    let model_path = dir.path().join("d.json");
    io::save_model(&AnySsp::Disturbance(d.clone()), &model_path).unwrap();
    let (code_ce, out_ce) = run(&[
        "ssp-lab", "certify", "--model", model_path.to_str().unwrap(), "--ce", "--from", "0",
        "--format", "table",
    ]);
    assert_eq!(code_ce, 0, "output: {out_ce}");
    let kernel = ssp_lab::induce_kernel(&d).unwrap();
    let kernel_path = dir.path().join("k.json");
    io::save_model(&AnySsp::Kernel(kernel), &kernel_path).unwrap();
    let (code_ro, out_ro) = run(&[
        "ssp-lab", "certify", "--model", kernel_path.to_str().unwrap(), "--from", "0",
        "--format", "table",
    ]);
    assert_eq!(code_ro, 0);
    assert_eq!(out_ce, out_ro);
}

#[test]
fn certify_from_terminal_state_is_trivially_certified() {
    let (code, out) = run(&[
        "ssp-lab", "certify", "--scenario", "sharpness", "--M", "2", "--eps", "0.1", "--from",
        "3",
    ]);
    assert_eq!(code, 0, "output: {out}");
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["expected_tau"].as_f64().unwrap(), 0.0);
}
