//! Cross-module scenario pipelines: gridworld models flowing through
//! certainty-equivalent certification, and degenerate cases where one of
//! the two error terms vanishes.

use ssp_lab::certificates::{
    ce_certificate, rollout_certificate, CertificateOptions, CERT_VI_MAX_ITERS, CERT_VI_TOL,
};
use ssp_lab::model::{induce_kernel, StateId};
use ssp_lab::rollout::{ce_policy, mismatch_delta};
use ssp_lab::scenarios::{
    frozen_obstacle_value, gridworld_nav, random_disturbance_ssp, Connectivity, GridworldSpec,
    Move, RandomDisturbanceSpec,
};
use ssp_lab::solver::{policy_evaluation_exact, value_iteration};

fn moving_obstacle_grid() -> GridworldSpec {
    GridworldSpec {
        width: 5,
        height: 5,
        robot_start: (0, 0),
        target: (4, 4),
        arrival_radius: 0,
        obstacle_start: (2, 2),
        obstacle_moves: vec![
            (Move::Stay, 0.2),
            (Move::Up, 0.2),
            (Move::Down, 0.2),
            (Move::Left, 0.2),
            (Move::Right, 0.2),
        ],
        nominal_move: Move::Stay,
        collision_penalty: 4.0,
        connectivity: Connectivity::Four,
    }
}

/// Frozen-obstacle surrogate on the true moving-obstacle model: the
/// mismatch is strictly positive and the certified factor covers the gap.
#[test]
fn gridworld_ce_certificate_pipeline() {
    let spec = moving_obstacle_grid();
    let d = gridworld_nav(&spec).unwrap();
    let v = frozen_obstacle_value(&spec).unwrap();
    let report = ce_certificate(&d, &v, spec.start_state(), &CertificateOptions::default())
        .expect("CE policy is proper from the corner");
    assert!(report.delta > 0.0);
    assert!(report.epsilon > 0.0);
    assert!(report.gap >= 0.0);
    assert!(report.all_passed(), "checks: {:#?}", report.checks);

    // Localizing epsilon and delta to the reachable closure never loosens
    // the certificate.
    let localized = ce_certificate(
        &d,
        &v,
        spec.start_state(),
        &CertificateOptions {
            reachable_epsilon: true,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(localized.epsilon <= report.epsilon + 1e-12);
    assert!(localized.delta <= report.delta + 1e-12);
    assert!(localized.all_passed());
}

/// With the exact value function, the CE certificate is driven entirely by
/// the mismatch term: epsilon = 0 and gap <= 2 delta E[tau].
#[test]
fn ce_with_exact_value_is_bounded_by_delta_alone() {
    let mut nontrivial = 0usize;
    for seed in 0..30u64 {
        let d = random_disturbance_ssp(&RandomDisturbanceSpec {
            n_states: 9,
            n_actions: 3,
            n_disturbances: 4,
            cost_range: (0.1, 2.0),
            seed,
        })
        .unwrap();
        let kernel = induce_kernel(&d).unwrap();
        let vstar = value_iteration(&kernel, CERT_VI_TOL, CERT_VI_MAX_ITERS)
            .unwrap()
            .value;
        let report = ce_certificate(&d, &vstar, StateId(0), &CertificateOptions::default())
            .expect("t-reaching action keeps CE proper on these instances");
        assert_eq!(report.epsilon, 0.0, "seed {seed}");
        assert!(
            report.gap <= 2.0 * report.delta * report.expected_tau + 1e-8,
            "seed {seed}"
        );
        assert!(report.all_passed(), "seed {seed}");
        nontrivial += usize::from(report.delta > 0.0);
    }
    assert!(nontrivial > 20, "sweep should exercise nonzero mismatch");
}

/// Deterministic disturbance and exact value: certainty equivalence
/// coincides with exact greedy, which is optimal.
#[test]
fn deterministic_ce_with_exact_value_is_optimal() {
    let d = random_disturbance_ssp(&RandomDisturbanceSpec {
        n_states: 10,
        n_actions: 3,
        n_disturbances: 1,
        cost_range: (0.1, 2.0),
        seed: 77,
    })
    .unwrap();
    let kernel = induce_kernel(&d).unwrap();
    let vstar = value_iteration(&kernel, CERT_VI_TOL, CERT_VI_MAX_ITERS)
        .unwrap()
        .value;
    assert_eq!(mismatch_delta(&d, &vstar).delta, 0.0);
    let pi = ce_policy(&d, &vstar);
    let cost = policy_evaluation_exact(&kernel, &pi, StateId(0)).unwrap().value;
    assert!((cost - vstar.value(StateId(0))).abs() < 1e-9);

    let report = ce_certificate(&d, &vstar, StateId(0), &CertificateOptions::default()).unwrap();
    assert_eq!(report.delta, 0.0);
    assert!(report.gap < 1e-9);
    let rollout = rollout_certificate(&kernel, &vstar, StateId(0), &CertificateOptions::default())
        .unwrap();
    assert_eq!(report, rollout);
}
