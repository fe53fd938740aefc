//! Property tests for the model conversions and the Bellman operator.

use proptest::prelude::*;

use ssp_lab::model::{induce_kernel, unit_cost, ActionId, DisturbanceSsp, StateId, ValueFunction};
use ssp_lab::scenarios::{random_proper_ssp, RandomSspSpec};
use ssp_lab::solver::{bellman_apply, hitting_time_exact, occupation_measure, solve_optimal};

/// Arbitrary valid disturbance-form model: random disturbance weights
/// (normalized), random successor tables, nonnegative costs, absorbing
/// terminal at the last index.
fn arb_disturbance_model() -> impl Strategy<Value = DisturbanceSsp> {
    (2usize..7, 1usize..4, 1usize..5).prop_flat_map(|(n, n_actions, n_dist)| {
        let weights = proptest::collection::vec(0.05f64..1.0, n_dist);
        let successors = proptest::collection::vec(
            proptest::collection::vec(proptest::collection::vec(0usize..n, n_dist), n_actions),
            n - 1,
        );
        let costs = proptest::collection::vec(
            proptest::collection::vec(0.0f64..3.0, n_actions),
            n - 1,
        );
        let nominal = 0usize..n_dist;
        (weights, successors, costs, nominal).prop_map(
            move |(weights, successors, costs, nominal)| {
                let total: f64 = weights.iter().sum();
                let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
                let terminal = StateId(n - 1);
                let mut actions: Vec<Vec<String>> = (0..n - 1)
                    .map(|_| (0..n_actions).map(|a| format!("a{a}")).collect())
                    .collect();
                actions.push(vec!["stop".to_string()]);
                let mut succ: Vec<Vec<Vec<StateId>>> = successors
                    .into_iter()
                    .map(|per_action| {
                        per_action
                            .into_iter()
                            .map(|by_w| by_w.into_iter().map(StateId).collect())
                            .collect()
                    })
                    .collect();
                succ.push(vec![vec![terminal; n_dist]]);
                let mut all_costs = costs;
                all_costs.push(vec![0.0]);
                DisturbanceSsp::from_parts(
                    n,
                    terminal,
                    actions,
                    all_costs,
                    (0..n_dist).map(|w| format!("w{w}")).collect(),
                    probs,
                    nominal,
                    succ,
                )
                .expect("generated shape is consistent")
                .validated()
                .expect("generated model is valid")
            },
        )
    })
}

proptest! {
    /// The induced kernel of any valid disturbance model is itself valid,
    /// and each of its rows carries exactly the disturbance mass.
    #[test]
    fn induced_kernel_is_valid(d in arb_disturbance_model()) {
        let k = induce_kernel(&d).unwrap();
        prop_assert!(k.validate().is_valid());
        for x in k.states() {
            for u in 0..k.n_actions(x) {
                let sum: f64 = k.row(x, ActionId(u)).iter().map(|&(_, p)| p).sum();
                prop_assert!((sum - 1.0).abs() <= 1e-12);
            }
        }
    }

    /// Validation is idempotent: a second pass renormalizes nothing and
    /// changes no bit, so repeated loads and conversions hash identically.
    #[test]
    fn validation_is_idempotent(d in arb_disturbance_model()) {
        let once = d.clone().validated().unwrap();
        let twice = once.clone().validated().unwrap();
        prop_assert_eq!(&once, &twice);
        let k = induce_kernel(&d).unwrap();
        prop_assert_eq!(&k, &k.clone().validated().unwrap());
    }

    /// Unit-cost rewriting changes only costs, bit for bit, and is
    /// idempotent.
    #[test]
    fn unit_cost_preserves_dynamics(d in arb_disturbance_model()) {
        let k = induce_kernel(&d).unwrap();
        let u = unit_cost(&k);
        for x in k.states() {
            for a in 0..k.n_actions(x) {
                prop_assert_eq!(u.row(x, ActionId(a)), k.row(x, ActionId(a)));
            }
        }
        prop_assert_eq!(unit_cost(&u), u);
    }

    /// Sup-norm non-expansiveness of the one-step operator.
    #[test]
    fn bellman_is_nonexpansive(
        seed in any::<u64>(),
        n in 3usize..9,
        pair_seed in any::<u64>(),
    ) {
        let m = random_proper_ssp(&RandomSspSpec {
            n_states: n,
            n_actions: 3,
            density: 0.5,
            cost_range: (0.0, 2.0),
            seed,
        }).unwrap();
        let mut rng = ssp_lab::SplitMix64::new(pair_seed);
        let mut draw = |t: StateId| {
            let mut v: Vec<f64> = (0..n).map(|_| 20.0 * rng.next_f64() - 10.0).collect();
            v[t.index()] = 0.0;
            ValueFunction::new(v, t).unwrap()
        };
        let v1 = draw(m.terminal());
        let v2 = draw(m.terminal());
        let (tv1, _) = bellman_apply(&m, &v1);
        let (tv2, _) = bellman_apply(&m, &v2);
        prop_assert!(tv1.sup_distance(&tv2) <= v1.sup_distance(&v2) + 1e-12);
    }

    /// Monotonicity: pointwise V1 <= V2 implies TV1 <= TV2 pointwise.
    #[test]
    fn bellman_is_monotone(d in arb_disturbance_model(), shift in 0.0f64..5.0) {
        let k = induce_kernel(&d).unwrap();
        let n = k.n_states();
        let strategy_seed = (shift * 1e6) as u64;
        let mut rng = ssp_lab::SplitMix64::new(strategy_seed);
        let mut v1: Vec<f64> = (0..n).map(|_| 10.0 * rng.next_f64() - 5.0).collect();
        v1[k.terminal().index()] = 0.0;
        let v2: Vec<f64> = v1
            .iter()
            .enumerate()
            .map(|(x, &v)| if x == k.terminal().index() { 0.0 } else { v + shift })
            .collect();
        let v1 = ValueFunction::new(v1, k.terminal()).unwrap();
        let v2 = ValueFunction::new(v2, k.terminal()).unwrap();
        let (tv1, _) = bellman_apply(&k, &v1);
        let (tv2, _) = bellman_apply(&k, &v2);
        for x in k.states() {
            prop_assert!(tv1.value(x) <= tv2.value(x));
        }
    }

    /// Occupation-measure mass equals the expected hitting time.
    #[test]
    fn occupation_mass_is_hitting_time(seed in any::<u64>(), n in 3usize..10) {
        let m = random_proper_ssp(&RandomSspSpec {
            n_states: n,
            n_actions: 2,
            density: 0.6,
            cost_range: (0.1, 1.0),
            seed,
        }).unwrap();
        let pi = solve_optimal(&m).unwrap().greedy;
        let tau = hitting_time_exact(&m, &pi, StateId(0)).unwrap();
        let mu = occupation_measure(&m, &pi, StateId(0)).unwrap();
        prop_assert!((mu.total() - tau).abs() <= 1e-9);
    }

    /// Simulated trajectories only take positive-probability closed-loop
    /// steps and end at the terminal state when absorbed.
    #[test]
    fn trajectories_follow_the_closed_loop(seed in any::<u64>(), sim_seed in any::<u64>()) {
        let m = random_proper_ssp(&RandomSspSpec {
            n_states: 7,
            n_actions: 2,
            density: 0.5,
            cost_range: (0.1, 1.0),
            seed,
        }).unwrap();
        let pi = solve_optimal(&m).unwrap().greedy;
        let traj = ssp_lab::simulate((&m).into(), &pi, StateId(0), sim_seed, 10_000);
        for (k, window) in traj.states.windows(2).enumerate() {
            let (x, y) = (window[0], window[1]);
            prop_assert_eq!(traj.actions[k], pi.action(x));
            let mass: f64 = m
                .row(x, pi.action(x))
                .iter()
                .filter(|&&(succ, _)| succ == y)
                .map(|&(_, p)| p)
                .sum();
            prop_assert!(mass > 0.0, "impossible transition {} -> {}", x, y);
        }
        if let ssp_lab::montecarlo::Outcome::Absorbed { tau } = traj.outcome {
            prop_assert_eq!(traj.states.last().copied(), Some(m.terminal()));
            prop_assert_eq!(traj.costs.len(), tau);
        }
    }

    /// Every value function the surrogate-noise helper produces stays
    /// within its amplitude and keeps the terminal pinned.
    #[test]
    fn noisy_values_stay_in_band(seed in any::<u64>(), amplitude in 0.0f64..0.5) {
        let m = random_proper_ssp(&RandomSspSpec {
            n_states: 6,
            n_actions: 2,
            density: 0.5,
            cost_range: (0.1, 1.0),
            seed,
        }).unwrap();
        let vstar = solve_optimal(&m).unwrap().value;
        let v = ssp_lab::noisy_value(&vstar, amplitude, seed ^ 1, m.terminal());
        prop_assert!(v.sup_distance(&vstar) <= amplitude);
        prop_assert_eq!(v.value(m.terminal()), 0.0);
    }
}
