//! Full rollout-certificate walkthrough on a random SSP: perturb the
//! exact value with uniform noise, build the one-step greedy policy, and
//! certify its suboptimality gap against `2 ε E[τ]`.
//!
//! ```bash
//! cargo run --example rollout_certificate
//! ```

use ssp_lab::certificates::{rollout_certificate, CertificateOptions};
use ssp_lab::model::StateId;
use ssp_lab::scenarios::{noisy_value, random_proper_ssp, RandomSspSpec};
use ssp_lab::solver::solve_optimal;

fn main() {
    let model = random_proper_ssp(&RandomSspSpec {
        n_states: 15,
        n_actions: 3,
        density: 0.4,
        cost_range: (0.1, 2.0),
        seed: 7,
    })
    .expect("valid spec");
    let vstar = solve_optimal(&model).expect("solvable").value;
    let amplitude = 0.1;
    let v = noisy_value(&vstar, amplitude, 42, model.terminal());

    let report = rollout_certificate(
        &model,
        &v,
        StateId(0),
        &CertificateOptions {
            local_error: true,
            ..Default::default()
        },
    )
    .expect("rollout is proper on this instance");

    println!("random SSP, {} states, noise amplitude {amplitude}", model.n_states());
    println!("  epsilon (measured)     = {:.6}", report.epsilon);
    println!("  V*(0)                  = {:.6}", report.vstar_at_start);
    println!("  J^pi(0)                = {:.6}", report.policy_cost);
    println!("  gap                    = {:.6}", report.gap);
    println!("  E[tau]                 = {:.6}", report.expected_tau);
    println!("  bound 2*eps*E[tau]     = {:.6}", report.bound_hitting);
    println!("  local (occupation) bnd = {:.6}", report.bound_local.unwrap());
    println!("  identity residual      = {:.2e}", report.identity_residual);
    println!();
    println!("checks:");
    for check in &report.checks {
        println!(
            "  {:32} {}  (lhs {:.3e} <= rhs {:.3e})",
            check.name,
            if check.passed { "pass" } else { "FAIL" },
            check.lhs,
            check.rhs,
        );
    }
    assert!(report.all_passed());
}
