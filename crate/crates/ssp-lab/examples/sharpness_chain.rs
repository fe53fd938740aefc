//! The deterministic chain on which hitting-time amplification of the
//! rollout gap is unavoidable: a surrogate value that is uniformly wrong
//! by `eps` makes the greedy policy walk the whole chain before stopping,
//! so the realized gap grows linearly with the expected hitting time while
//! `eps` stays fixed.
//!
//! ```bash
//! cargo run --example sharpness_chain
//! ```

use ssp_lab::certificates::{rollout_certificate, CertificateOptions};
use ssp_lab::model::StateId;
use ssp_lab::scenarios::{sharpness_chain, SharpnessSpec};

fn main() {
    let eps = 0.1;
    println!("chain surrogate error eps = {eps}");
    println!("{:>6} {:>10} {:>10} {:>12} {:>14}", "M", "gap", "E[tau]", "2*eps*E[tau]", "gap/(eps*tau)");
    for m in [1usize, 4, 10, 100, 1000] {
        let inst = sharpness_chain(&SharpnessSpec { m, eps }).expect("valid spec");
        let report = rollout_certificate(
            &inst.model,
            &inst.surrogate,
            StateId(0),
            &CertificateOptions::default(),
        )
        .expect("chain rollout is proper");
        assert!(report.all_passed());
        println!(
            "{m:>6} {:>10.4} {:>10} {:>12.4} {:>14.4}",
            report.gap,
            report.expected_tau,
            report.bound_hitting,
            report.gap / (report.epsilon * report.expected_tau),
        );
    }
    println!();
    println!("The gap/(eps*tau) ratio stays in [1/4, 1/2] for every chain length:");
    println!("no bound of the form C*eps with a fixed constant C can hold, while");
    println!("the certified 2*eps*E[tau] always does.");
}
