//! Certifying a policy that is only η-greedy: if a supplied policy misses
//! the one-step minimum by at most η at every state, the certified factor
//! widens from `2ε` to `2ε + η`. Here a deliberately sloppy policy takes
//! the second-best action at one state and still gets a valid certificate.
//!
//! ```bash
//! cargo run --example inexact_greedy
//! ```

use ssp_lab::certificates::{policy_certificate, CertificateOptions};
use ssp_lab::model::{ActionId, StateId, StationaryPolicy};
use ssp_lab::rollout::{eta_inexactness, greedy_policy};
use ssp_lab::scenarios::{noisy_value, random_proper_ssp, RandomSspSpec};
use ssp_lab::solver::solve_optimal;

fn main() {
    let model = random_proper_ssp(&RandomSspSpec {
        n_states: 10,
        n_actions: 3,
        density: 0.5,
        cost_range: (0.2, 2.0),
        seed: 13,
    })
    .expect("valid spec");
    let vstar = solve_optimal(&model).expect("solvable").value;
    let v = noisy_value(&vstar, 0.05, 99, model.terminal());

    // Start from the exact greedy policy, then spoil one state.
    let (greedy, diag) = greedy_policy(&model, &v);
    let spoiled_state = model
        .nonterminal_states()
        .find(|&x| model.n_actions(x) > 1 && diag.runner_up_gap[x.index()].is_finite())
        .expect("some state has a second-best action");
    let mut choices = greedy.choices().to_vec();
    let off_greedy = (0..model.n_actions(spoiled_state))
        .map(ActionId)
        .find(|&u| u != greedy.action(spoiled_state))
        .unwrap();
    choices[spoiled_state.index()] = off_greedy;
    let sloppy = StationaryPolicy::new(choices, &model).expect("still admissible");

    let eta = eta_inexactness(&model, &v, &sloppy);
    println!("spoiled state {spoiled_state}: eta(x) = {:.6}", eta.per_state[spoiled_state.index()]);
    println!("eta = max_x eta(x) = {:.6}", eta.eta);

    let report = policy_certificate(&model, &v, &sloppy, StateId(0), &CertificateOptions::default())
        .expect("sloppy policy is still proper here");
    println!("  epsilon     = {:.6}", report.epsilon);
    println!("  eta         = {:.6}", report.eta);
    println!("  gap         = {:.6}", report.gap);
    println!("  E[tau]      = {:.6}", report.expected_tau);
    println!("  (2 eps + eta) E[tau] = {:.6}", report.bound_hitting);
    assert!(report.all_passed());
    println!("certificate holds with the widened factor.");
}
