//! Drift certificates: a nonnegative function that decreases by at least
//! `c` in expectation per nonterminal step certifies `E[τ] ≤ L(x)/c`
//! without solving the chain. Both instances here make the bound tight.
//!
//! ```bash
//! cargo run --example lyapunov_drift
//! ```

use ssp_lab::certificates::{lyapunov_check, CertificateError};
use ssp_lab::model::{ActionId, KernelSsp, StateId, StationaryPolicy};

fn main() {
    // Countdown chain: terminal at index 0, state i exactly i steps out.
    let k = 10usize;
    let n = k + 1;
    let mut actions = vec![vec!["down".to_string()]; n];
    actions[0] = vec!["stop".to_string()];
    let mut rows = Vec::new();
    let mut costs = Vec::new();
    for i in 0..n {
        let target = i.saturating_sub(1);
        rows.push(vec![vec![(StateId(target), 1.0)]]);
        costs.push(vec![if i == 0 { 0.0 } else { 1.0 }]);
    }
    let countdown = KernelSsp::from_parts(n, StateId(0), actions, rows, costs)
        .unwrap()
        .validated()
        .unwrap();
    let pi = StationaryPolicy::new(vec![ActionId(0); n], &countdown).unwrap();
    let l: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let cert = lyapunov_check(&countdown, &pi, &l, 1.0, StateId(k), false).unwrap();
    println!("countdown chain, L(i) = i, c = 1:");
    println!("  certified E[tau] <= {}", cert.certified_tau_bound);
    println!("  exact      E[tau] = {}", cert.expected_tau);

    // Overclaiming the drift is caught at the offending state.
    match lyapunov_check(&countdown, &pi, &l, 1.01, StateId(k), false) {
        Err(CertificateError::DriftViolated { state, .. }) => {
            println!("  overclaimed c = 1.01 rejected: drift violated at state {state}");
        }
        other => panic!("expected a drift violation, got {other:?}"),
    }

    // Geometric absorption: stay with probability 1/2, absorb otherwise.
    let geometric = KernelSsp::from_parts(
        2,
        StateId(1),
        vec![vec!["go".into()], vec!["stop".into()]],
        vec![
            vec![vec![(StateId(0), 0.5), (StateId(1), 0.5)]],
            vec![vec![(StateId(1), 1.0)]],
        ],
        vec![vec![1.0], vec![0.0]],
    )
    .unwrap()
    .validated()
    .unwrap();
    let pi = StationaryPolicy::new(vec![ActionId(0); 2], &geometric).unwrap();
    let cert = lyapunov_check(&geometric, &pi, &[2.0, 0.0], 1.0, StateId(0), true).unwrap();
    println!();
    println!("geometric absorption, L = (2, 0), c = 1 (uniform over actions):");
    println!("  drift: 0.5*2 + 0.5*0 = 1 <= L(x) - c = 1  (tight)");
    println!("  certified E[tau] <= {}", cert.certified_tau_bound);
    println!("  exact      E[tau] = {}", cert.expected_tau);
}
