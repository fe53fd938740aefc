//! One-step greedy (rollout) and certainty-equivalent policy construction,
//! with the two local inexactness measures that feed the certificates:
//! the model-mismatch term δ of certainty-equivalent lookahead and the
//! η-inexactness of an arbitrary policy against a value function.
//!
//! Ties in every argmin are broken by lowest action index, so the greedy
//! policy of an induced kernel and the certainty-equivalent policy on the
//! underlying deterministic disturbance model coincide bit for bit.

use crate::model::{ActionId, DisturbanceSsp, KernelSsp, StationaryPolicy, ValueFunction};
use crate::solver::{best_action, q_value};

/// Per-state record of the greedy minimization.
#[derive(Clone, Debug)]
pub struct GreedyDiagnostics {
    /// Minimizing action per state (stop at the terminal).
    pub chosen: Vec<ActionId>,
    /// Minimized one-step score per state; equals `(TV)(x)` exactly.
    pub score: Vec<f64>,
    /// Second-best score minus best score; infinite where a state has a
    /// single admissible action, zero only on exact ties.
    pub runner_up_gap: Vec<f64>,
}

/// Builds the one-step greedy policy
/// `π_R(x) ∈ argmin_u [f(x,u) + Σ_y p(y|x,u) V(y)]`, lowest index on ties,
/// with the stop action at the terminal state.
pub fn greedy_policy(model: &KernelSsp, v: &ValueFunction) -> (StationaryPolicy, GreedyDiagnostics) {
    let n = model.n_states();
    let mut chosen = vec![ActionId(0); n];
    let mut score = vec![0.0; n];
    let mut runner_up_gap = vec![f64::INFINITY; n];
    for x in model.nonterminal_states() {
        let (u, best, runner_up) = best_action(model, v, x);
        chosen[x.index()] = u;
        score[x.index()] = best;
        runner_up_gap[x.index()] = runner_up - best;
    }
    (
        StationaryPolicy::from_choices_unchecked(chosen.clone()),
        GreedyDiagnostics {
            chosen,
            score,
            runner_up_gap,
        },
    )
}

/// Builds the certainty-equivalent policy
/// `π_CE(x) ∈ argmin_u [f(x,u) + V(F(x,u,w̄))]`, lowest index on ties. Only
/// the nominal successor enters the minimization, never the expectation
/// over disturbances.
pub fn ce_policy(d: &DisturbanceSsp, v: &ValueFunction) -> StationaryPolicy {
    let n = d.n_states();
    let mut chosen = vec![ActionId(0); n];
    for x in d.nonterminal_states() {
        let mut best = ActionId(0);
        let mut best_score = f64::INFINITY;
        for u in 0..d.n_actions(x) {
            let u = ActionId(u);
            let score = d.cost(x, u) + v.value(d.nominal_successor(x, u));
            if score < best_score {
                best_score = score;
                best = u;
            }
        }
        chosen[x.index()] = best;
    }
    StationaryPolicy::from_choices_unchecked(chosen)
}

/// The model-mismatch term and its per-pair table.
#[derive(Clone, Debug)]
pub struct MismatchReport {
    /// `δ = max_{x,u} | Σ_w q(w) V(F(x,u,w)) - V(F(x,u,w̄)) |`.
    pub delta: f64,
    /// `per_pair[x][u]`, zero-filled at the terminal state.
    pub per_pair: Vec<Vec<f64>>,
}

/// Computes the mismatch between expected and nominal one-step lookahead
/// under `v`, as a sup over every nonterminal state and admissible action.
pub fn mismatch_delta(d: &DisturbanceSsp, v: &ValueFunction) -> MismatchReport {
    mismatch_delta_on(d, v, None)
}

/// Same as [`mismatch_delta`], restricted to states where
/// `include[x]` is true (the localized variant; `None` means all
/// nonterminal states).
pub fn mismatch_delta_on(
    d: &DisturbanceSsp,
    v: &ValueFunction,
    include: Option<&[bool]>,
) -> MismatchReport {
    let mut delta = 0.0;
    let mut per_pair = Vec::with_capacity(d.n_states());
    for x in d.states() {
        if d.is_terminal(x) {
            per_pair.push(vec![0.0; d.n_actions(x)]);
            continue;
        }
        let mut row = Vec::with_capacity(d.n_actions(x));
        let included = include.is_none_or(|set| set[x.index()]);
        for u in 0..d.n_actions(x) {
            let u = ActionId(u);
            let mut expected = 0.0;
            for (w, &q) in d.disturbance_probs().iter().enumerate() {
                expected += q * v.value(d.successor(x, u, w));
            }
            let nominal = v.value(d.nominal_successor(x, u));
            let gap = (expected - nominal).abs();
            row.push(gap);
            if included && gap > delta {
                delta = gap;
            }
        }
        per_pair.push(row);
    }
    MismatchReport { delta, per_pair }
}

/// One-step inexactness of a policy against `v`.
#[derive(Clone, Debug)]
pub struct EtaReport {
    /// `η = max_x η(x)` over nonterminal states.
    pub eta: f64,
    /// `η(x) = Q_V(x, π(x)) - min_u Q_V(x, u) ≥ 0`; zero at the terminal.
    pub per_state: Vec<f64>,
}

/// Measures how far `pi` is from exact one-step greediness with respect to
/// `v`. Zero iff `pi` attains the greedy minimum at every state; the value
/// feeds the `+ η·E[τ]` correction of the hitting-time bound.
pub fn eta_inexactness(model: &KernelSsp, v: &ValueFunction, pi: &StationaryPolicy) -> EtaReport {
    let mut eta = 0.0;
    let mut per_state = vec![0.0; model.n_states()];
    for x in model.nonterminal_states() {
        let (_, best, _) = best_action(model, v, x);
        let chosen = q_value(model, v, x, pi.action(x));
        let gap = (chosen - best).max(0.0);
        per_state[x.index()] = gap;
        if gap > eta {
            eta = gap;
        }
    }
    EtaReport { eta, per_state }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{induce_kernel, StateId};
    use crate::scenarios::{
        random_disturbance_ssp, sharpness_chain, RandomDisturbanceSpec, SharpnessSpec,
    };
    use crate::solver::{bellman_apply, policy_evaluation_exact, solve_optimal};

    #[test]
    fn greedy_at_optimal_value_is_optimal() {
        let inst = sharpness_chain(&SharpnessSpec { m: 4, eps: 0.1 }).unwrap();
        let solved = solve_optimal(&inst.model).unwrap();
        let (pi, _) = greedy_policy(&inst.model, &solved.value);
        let j = policy_evaluation_exact(&inst.model, &pi, StateId(0)).unwrap();
        assert!((j.value - solved.value.value(StateId(0))).abs() < 1e-12);
    }

    #[test]
    fn sharpness_surrogate_walks_the_chain() {
        let inst = sharpness_chain(&SharpnessSpec { m: 4, eps: 0.1 }).unwrap();
        let (pi, diag) = greedy_policy(&inst.model, &inst.surrogate);
        for i in 0..4 {
            assert_eq!(pi.action(StateId(i)), ActionId(1));
            assert_eq!(diag.score[i], -0.05);
        }
        assert_eq!(pi.action(StateId(4)), ActionId(0));
    }

    #[test]
    fn greedy_scores_equal_bellman_apply_exactly() {
        let d = random_disturbance_ssp(&RandomDisturbanceSpec {
            n_states: 9,
            n_actions: 3,
            n_disturbances: 3,
            cost_range: (0.0, 2.0),
            seed: 5,
        })
        .unwrap();
        let k = induce_kernel(&d).unwrap();
        let v = crate::scenarios::noisy_value(
            &solve_optimal(&k).unwrap().value,
            0.5,
            77,
            k.terminal(),
        );
        let (tv, greedy_from_bellman) = bellman_apply(&k, &v);
        let (pi, diag) = greedy_policy(&k, &v);
        for x in k.states() {
            assert_eq!(diag.score[x.index()], tv.value(x));
            assert_eq!(pi.action(x), greedy_from_bellman.action(x));
        }
    }

    /// Single disturbance: certainty-equivalent lookahead and expected
    /// lookahead are the same minimization, so the policies must coincide
    /// bit for bit.
    #[test]
    fn deterministic_ce_equals_greedy() {
        let d = random_disturbance_ssp(&RandomDisturbanceSpec {
            n_states: 8,
            n_actions: 3,
            n_disturbances: 1,
            cost_range: (0.1, 2.0),
            seed: 21,
        })
        .unwrap();
        let k = induce_kernel(&d).unwrap();
        let v = crate::scenarios::noisy_value(
            &solve_optimal(&k).unwrap().value,
            0.3,
            4,
            k.terminal(),
        );
        let (greedy, _) = greedy_policy(&k, &v);
        let ce = ce_policy(&d, &v);
        assert_eq!(greedy.choices(), ce.choices());
        assert_eq!(mismatch_delta(&d, &v).delta, 0.0);
    }

    /// Two actions, two equiprobable disturbances. Action 0 looks great
    /// under the nominal disturbance but terrible in expectation; action 1
    /// is deterministic and middling. CE and greedy must disagree.
    #[test]
    fn nominal_attraction_splits_ce_from_greedy() {
        // States: 0 (decision), 1 (nominal-good), 2 (bad), 3 (middling), 4 = t.
        let d = DisturbanceSsp::from_parts(
            5,
            StateId(4),
            vec![
                vec!["risky".into(), "safe".into()],
                vec!["go".into()],
                vec!["go".into()],
                vec!["go".into()],
                vec!["stop".into()],
            ],
            vec![
                vec![1.0, 1.0],
                vec![1.0],
                vec![1.0],
                vec![1.0],
                vec![0.0],
            ],
            vec!["w0".into(), "w1".into()],
            vec![0.5, 0.5],
            0,
            vec![
                vec![vec![StateId(1), StateId(2)], vec![StateId(3), StateId(3)]],
                vec![vec![StateId(4), StateId(4)]],
                vec![vec![StateId(4), StateId(4)]],
                vec![vec![StateId(4), StateId(4)]],
                vec![vec![StateId(4), StateId(4)]],
            ],
        )
        .unwrap()
        .validated()
        .unwrap();
        // V(1) = 0 looks free, V(2) = 10 is awful, V(3) = 2 is middling.
        let v = ValueFunction::new(vec![0.0, 0.0, 10.0, 2.0, 0.0], StateId(4)).unwrap();
        let ce = ce_policy(&d, &v);
        assert_eq!(ce.action(StateId(0)), ActionId(0), "CE chases the nominal successor");
        let k = induce_kernel(&d).unwrap();
        // Greedy: risky = 1 + 0.5*0 + 0.5*10 = 6; safe = 1 + 2 = 3.
        let (greedy, _) = greedy_policy(&k, &v);
        assert_eq!(greedy.action(StateId(0)), ActionId(1));
        // Hand-computed mismatch at (0, risky): |5 - 0| = 5.
        let report = mismatch_delta(&d, &v);
        assert_eq!(report.per_pair[0][0], 5.0);
        assert_eq!(report.per_pair[0][1], 0.0);
        assert_eq!(report.delta, 5.0);
    }

    #[test]
    fn two_point_mismatch_example() {
        // One state, one action, equiprobable w; F(.,w0) = t, F(.,w1) = y
        // with V(y) = 4 and nominal w0: delta = |2 - 0| = 2.
        let d = DisturbanceSsp::from_parts(
            3,
            StateId(2),
            vec![vec!["a".into()], vec!["go".into()], vec!["stop".into()]],
            vec![vec![1.0], vec![1.0], vec![0.0]],
            vec!["w0".into(), "w1".into()],
            vec![0.5, 0.5],
            0,
            vec![
                vec![vec![StateId(2), StateId(1)]],
                vec![vec![StateId(2), StateId(2)]],
                vec![vec![StateId(2), StateId(2)]],
            ],
        )
        .unwrap();
        let v = ValueFunction::new(vec![0.0, 4.0, 0.0], StateId(2)).unwrap();
        assert_eq!(mismatch_delta(&d, &v).delta, 2.0);
    }

    #[test]
    fn zero_value_has_zero_mismatch() {
        let d = random_disturbance_ssp(&RandomDisturbanceSpec {
            n_states: 6,
            n_actions: 2,
            n_disturbances: 3,
            cost_range: (0.1, 1.0),
            seed: 2,
        })
        .unwrap();
        let v = ValueFunction::zeros(d.n_states());
        assert_eq!(mismatch_delta(&d, &v).delta, 0.0);
    }

    #[test]
    fn eta_of_exact_greedy_is_zero() {
        let inst = sharpness_chain(&SharpnessSpec { m: 5, eps: 0.2 }).unwrap();
        let (pi, _) = greedy_policy(&inst.model, &inst.surrogate);
        let report = eta_inexactness(&inst.model, &inst.surrogate, &pi);
        assert_eq!(report.eta, 0.0);
    }

    #[test]
    fn eta_of_second_best_choice_is_the_runner_up_gap() {
        let inst = sharpness_chain(&SharpnessSpec { m: 3, eps: 0.2 }).unwrap();
        let (pi, diag) = greedy_policy(&inst.model, &inst.surrogate);
        // Deliberately stop at state 1 instead of continuing.
        let mut choices = pi.choices().to_vec();
        choices[1] = ActionId(0);
        let off = StationaryPolicy::new(choices, &inst.model).unwrap();
        let report = eta_inexactness(&inst.model, &inst.surrogate, &off);
        assert_eq!(report.per_state[1], diag.runner_up_gap[1]);
        assert_eq!(report.eta, diag.runner_up_gap[1]);
        assert_eq!(report.per_state[0], 0.0);
    }

    /// The one-step loss of the CE choice against the expected lookahead
    /// is at most twice the mismatch.
    #[test]
    fn ce_eta_is_bounded_by_twice_delta() {
        for seed in 0..30u64 {
            let d = random_disturbance_ssp(&RandomDisturbanceSpec {
                n_states: 8,
                n_actions: 3,
                n_disturbances: 4,
                cost_range: (0.1, 1.5),
                seed,
            })
            .unwrap();
            let k = induce_kernel(&d).unwrap();
            let v = crate::scenarios::noisy_value(
                &solve_optimal(&k).unwrap().value,
                0.2,
                seed ^ 0xABCD,
                k.terminal(),
            );
            let ce = ce_policy(&d, &v);
            let eta = eta_inexactness(&k, &v, &ce);
            let delta = mismatch_delta(&d, &v).delta;
            assert!(
                eta.eta <= 2.0 * delta + 1e-12,
                "seed {seed}: eta {} vs 2 delta {}",
                eta.eta,
                2.0 * delta
            );
        }
    }
}
