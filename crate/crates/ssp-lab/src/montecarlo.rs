//! Seeded trajectory simulation and empirical policy evaluation.
//!
//! Simulation is a pure function of `(model, policy, start, seed,
//! max_steps)`. Randomness comes from a self-contained SplitMix64
//! generator, fully specified by its constants so independent
//! implementations reproduce every trajectory bit for bit:
//!
//! ```text
//! state ← state + 0x9E3779B97F4A7C15                 (per draw)
//! z ← state
//! z ← (z ⊕ (z >> 30)) · 0xBF58476D1CE4E5B9
//! z ← (z ⊕ (z >> 27)) · 0x94D049BB133111EB
//! output = z ⊕ (z >> 31)
//! ```
//!
//! all in wrapping 64-bit arithmetic; uniform doubles take the top 53 bits,
//! `(output >> 11) · 2⁻⁵³ ∈ [0, 1)`.
//!
//! Replication `r` of an estimate runs on its own stream whose initial
//! state is `mix64(seed ⊕ mix64(r + 1))`, where `mix64` is the finalizer
//! above (the three xor-shift/multiply lines). Replications are therefore
//! independent of execution order, and the reduction sums replication
//! statistics in index order, so serial and parallel runs coincide.
//!
//! Truncation is loud: undiscounted costs make truncated sums biased, so
//! any replication that hits `max_steps` before absorption marks the whole
//! estimate invalid.

use serde::{Deserialize, Serialize};

use crate::model::{ActionId, DisturbanceSsp, KernelSsp, StateId, StationaryPolicy};

/// Default step cap per trajectory.
pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

/// Two-sided 99% normal quantile used for confidence half-widths.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer; also used to derive per-replication streams.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based SplitMix64 stream.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Stream for replication `r` of a base seed.
    pub fn for_replication(seed: u64, r: u64) -> Self {
        Self::new(mix64(seed ^ mix64(r.wrapping_add(1))))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Index into a cumulative scan of `probs`; the final index absorbs
    /// any floating-point residue.
    pub fn sample_index(&mut self, probs: impl Iterator<Item = f64> + Clone) -> usize {
        let u = self.next_f64();
        let mut acc = 0.0;
        let mut last = 0;
        for (i, p) in probs.enumerate() {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
        last
    }
}

/// Either model form, borrowed for simulation.
#[derive(Clone, Copy, Debug)]
pub enum ModelRef<'a> {
    Kernel(&'a KernelSsp),
    Disturbance(&'a DisturbanceSsp),
}

impl<'a> From<&'a KernelSsp> for ModelRef<'a> {
    fn from(m: &'a KernelSsp) -> Self {
        ModelRef::Kernel(m)
    }
}

impl<'a> From<&'a DisturbanceSsp> for ModelRef<'a> {
    fn from(d: &'a DisturbanceSsp) -> Self {
        ModelRef::Disturbance(d)
    }
}

impl ModelRef<'_> {
    fn terminal(&self) -> StateId {
        match self {
            ModelRef::Kernel(m) => m.terminal(),
            ModelRef::Disturbance(d) => d.terminal(),
        }
    }

    fn cost(&self, x: StateId, u: ActionId) -> f64 {
        match self {
            ModelRef::Kernel(m) => m.cost(x, u),
            ModelRef::Disturbance(d) => d.cost(x, u),
        }
    }

    /// Samples one transition. Kernel form samples the sparse row
    /// directly; disturbance form samples `w ~ q` and applies `F`.
    fn step(&self, x: StateId, u: ActionId, rng: &mut SplitMix64) -> StateId {
        match self {
            ModelRef::Kernel(m) => {
                let row = m.row(x, u);
                let i = rng.sample_index(row.iter().map(|&(_, p)| p));
                row[i].0
            }
            ModelRef::Disturbance(d) => {
                let w = rng.sample_index(d.disturbance_probs().iter().copied());
                d.successor(x, u, w)
            }
        }
    }
}

/// How a simulated trajectory ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    /// Reached the terminal state after `tau` steps.
    Absorbed { tau: usize },
    /// Hit the step cap before absorption.
    Truncated,
}

/// One closed-loop trajectory.
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Visited states, starting at the start state; ends at the terminal
    /// state iff the trajectory was absorbed.
    pub states: Vec<StateId>,
    pub actions: Vec<ActionId>,
    pub costs: Vec<f64>,
    pub outcome: Outcome,
}

impl Trajectory {
    pub fn total_cost(&self) -> f64 {
        self.costs.iter().sum()
    }

    /// Per-step tabular dump for debugging: one `step,state,action,cost`
    /// line per transition, then the final state and outcome.
    pub fn to_table(&self) -> String {
        let mut out = String::from("step,state,action,cost\n");
        for (k, ((x, u), c)) in self
            .states
            .iter()
            .zip(&self.actions)
            .zip(&self.costs)
            .enumerate()
        {
            out.push_str(&format!("{k},{x},{u},{c}\n"));
        }
        let end = self.states.last().expect("trajectories are never empty");
        match self.outcome {
            Outcome::Absorbed { tau } => {
                out.push_str(&format!("absorbed,{end},,tau={tau}\n"));
            }
            Outcome::Truncated => {
                out.push_str(&format!("truncated,{end},,\n"));
            }
        }
        out
    }
}

/// Simulates `pi` from `from` until absorption or `max_steps`.
/// Deterministic in all of its arguments.
pub fn simulate(
    model: ModelRef<'_>,
    pi: &StationaryPolicy,
    from: StateId,
    seed: u64,
    max_steps: usize,
) -> Trajectory {
    let mut rng = SplitMix64::new(seed);
    simulate_with(model, pi, from, &mut rng, max_steps)
}

fn simulate_with(
    model: ModelRef<'_>,
    pi: &StationaryPolicy,
    from: StateId,
    rng: &mut SplitMix64,
    max_steps: usize,
) -> Trajectory {
    let terminal = model.terminal();
    let mut states = vec![from];
    let mut actions = Vec::new();
    let mut costs = Vec::new();
    let mut x = from;
    for step in 0..max_steps {
        if x == terminal {
            return Trajectory {
                states,
                actions,
                costs,
                outcome: Outcome::Absorbed { tau: step },
            };
        }
        let u = pi.action(x);
        actions.push(u);
        costs.push(model.cost(x, u));
        x = model.step(x, u, rng);
        states.push(x);
    }
    if x == terminal {
        Trajectory {
            states,
            actions,
            costs,
            outcome: Outcome::Absorbed { tau: max_steps },
        }
    } else {
        Trajectory {
            states,
            actions,
            costs,
            outcome: Outcome::Truncated,
        }
    }
}

/// Empirical cost and hitting-time estimate over seeded replications.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub replications: usize,
    pub seed: u64,
    pub mean_cost: f64,
    pub mean_tau: f64,
    /// Sample standard deviations (n - 1 denominator).
    pub sd_cost: f64,
    pub sd_tau: f64,
    /// 99% confidence half-widths under the normal approximation.
    pub half_width_cost: f64,
    pub half_width_tau: f64,
    pub truncated: usize,
    /// True iff no replication was truncated.
    pub valid: bool,
}

/// Streaming mean and sum of squared deviations (Welford). Exact for
/// constant samples, so degenerate (deterministic) estimates come out with
/// zero width instead of cancellation noise.
#[derive(Clone, Copy, Debug, Default)]
struct RunningMoments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn sd(&self) -> f64 {
        if self.count > 1.0 {
            (self.m2 / (self.count - 1.0)).max(0.0).sqrt()
        } else {
            0.0
        }
    }
}

/// Runs `replications` independent trajectories, replication `r` on the
/// stream derived from `(seed, r)`, and reduces in replication order.
pub fn estimate(
    model: ModelRef<'_>,
    pi: &StationaryPolicy,
    from: StateId,
    replications: usize,
    seed: u64,
    max_steps: usize,
) -> EstimateReport {
    let mut cost = RunningMoments::default();
    let mut tau = RunningMoments::default();
    let mut truncated = 0usize;
    for r in 0..replications {
        let mut rng = SplitMix64::for_replication(seed, r as u64);
        let traj = simulate_with(model, pi, from, &mut rng, max_steps);
        let steps = match traj.outcome {
            Outcome::Absorbed { tau } => tau as f64,
            Outcome::Truncated => {
                truncated += 1;
                traj.costs.len() as f64
            }
        };
        cost.push(traj.total_cost());
        tau.push(steps);
    }
    let half = |sd: f64| {
        if replications > 0 {
            Z_99 * sd / (replications as f64).sqrt()
        } else {
            f64::INFINITY
        }
    };
    EstimateReport {
        replications,
        seed,
        mean_cost: cost.mean,
        mean_tau: tau.mean,
        sd_cost: cost.sd(),
        sd_tau: tau.sd(),
        half_width_cost: half(cost.sd()),
        half_width_tau: half(tau.sd()),
        truncated,
        valid: truncated == 0,
    }
}
