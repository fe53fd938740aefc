//! The suboptimality of any proper stationary policy is exactly the
//! occupation-weighted sum of its optimal advantages:
//! `J^π(x) - V*(x) = Σ_y μ(y)·A*(y, π(y))`. This demo evaluates both
//! sides independently on a random instance and on the sharpness chain,
//! where every continue step contributes advantage `eps/2`.
//!
//! ```bash
//! cargo run --example performance_difference
//! ```

use ssp_lab::certificates::performance_difference;
use ssp_lab::model::{ActionId, StateId, StationaryPolicy};
use ssp_lab::rollout::greedy_policy;
use ssp_lab::scenarios::{random_proper_ssp, sharpness_chain, RandomSspSpec, SharpnessSpec};

fn main() {
    // Random instance with a deliberately mediocre policy: always the
    // escape action, never anything cheaper.
    let model = random_proper_ssp(&RandomSspSpec {
        n_states: 12,
        n_actions: 3,
        density: 0.4,
        cost_range: (0.1, 2.0),
        seed: 3,
    })
    .expect("valid spec");
    let pi = StationaryPolicy::new(vec![ActionId(0); model.n_states()], &model).unwrap();
    let pd = performance_difference(&model, &pi, StateId(0)).expect("action 0 is proper");
    println!("random SSP, always-escape policy:");
    println!("  J^pi(0) - V*(0)          = {:.10}", pd.lhs);
    println!("  sum_y mu(y) A*(y, pi(y)) = {:.10}", pd.rhs);
    println!("  residual                 = {:.2e}", pd.residual);

    // Sharpness chain: m continue steps, each with advantage eps/2.
    let (m, eps) = (8usize, 0.25);
    let inst = sharpness_chain(&SharpnessSpec { m, eps }).unwrap();
    let (rollout, _) = greedy_policy(&inst.model, &inst.surrogate);
    let pd = performance_difference(&inst.model, &rollout, StateId(0)).unwrap();
    println!();
    println!("sharpness chain (m = {m}, eps = {eps}):");
    println!("  gap            = {:.10}", pd.lhs);
    println!("  occupation sum = {:.10}", pd.rhs);
    println!("  m * eps/2      = {:.10}", m as f64 * eps / 2.0);
    assert!(pd.residual < 1e-8);
}
