//! Performance certificates for rollout and certainty-equivalent rollout
//! policies on finite SSP models.
//!
//! Given a model and an approximate value function `V`, a certificate
//! solves the model exactly, builds the policy under scrutiny, verifies
//! that its closed loop is proper from the start state, and then computes:
//!
//! - `ε = ‖V - V*‖∞` (globally, or over the closed loop's reachable
//!   closure when requested) and, for certainty-equivalent planning, the
//!   one-step model-mismatch `δ`;
//! - the exact suboptimality gap `J^π(x) - V*(x)` and the expected hitting
//!   time `E[τ]`, with the certified bound `(2(ε+δ) + η)·E[τ]`;
//! - the occupation-measure identity
//!   `J^π(x) - V*(x) = Σ_y μ(y)·A*(y, π(y))` and its numerical residual;
//! - the per-state one-step inequalities relating `(TV)` and `V*`;
//! - optional variants: `2(ε+δ)·N` under a uniform hitting bound,
//!   `2(ε+δ)·L(x)/c` under verified Lyapunov drift, and the
//!   occupation-weighted state-dependent error bound `2·Σ μ(y)·ε(y)`;
//! - for unit-cost (minimum expected hitting time) models, the
//!   multiplicative certificate `E[τ] ≤ H*(x)/(1 - 2(ε+δ))` plus the
//!   additive variants.
//!
//! Certificates are conditional: an improper closed loop is a refusal
//! error, never a number. Every comparison a certificate makes is recorded
//! in its `checks` list with raw left/right-hand sides so callers can
//! apply their own tolerances.

use serde::{Deserialize, Serialize};

use crate::io::kernel_hash;
use crate::model::{
    induce_kernel, unit_cost, ActionId, DisturbanceSsp, KernelSsp, StateId, StationaryPolicy,
    ValueFunction,
};
use crate::rollout::{ce_policy, eta_inexactness, greedy_policy, mismatch_delta};
use crate::solver::{
    advantage, bellman_apply, closed_loop_reachable, hitting_time_exact, occupation_measure,
    policy_evaluation_exact, properness_check, q_value, value_iteration, SolveError, SolveResult,
};

/// Absolute tolerance on certified-bound comparisons (desk-scale
/// magnitudes).
pub const BOUND_TOL: f64 = 1e-8;
/// Tolerance on the performance-difference identity residual.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Tolerance on the per-state one-step inequality checks; violations
/// beyond this indicate solver inconsistency.
pub const ONE_STEP_TOL: f64 = 1e-9;
/// Negative gaps within this tolerance are floating-point noise from an
/// optimal policy and are clamped to zero.
pub const GAP_CLAMP_TOL: f64 = 1e-9;
/// Tolerance on hitting-time comparisons (`E[τ] ≤ N`, `E[τ] ≤ L/c`).
pub const TAU_BOUND_TOL: f64 = 1e-9;
/// The occupation-weighted local bound never exceeds the uniform bound by
/// more than this.
pub const LOCAL_UNIFORM_TOL: f64 = 1e-10;
/// Slack allowed in the per-state drift inequality.
pub const DRIFT_TOL: f64 = 1e-12;
/// Value-iteration tolerance used inside certificates; tighter than the
/// solver default so one-step checks are not polluted by fixed-point
/// error.
pub const CERT_VI_TOL: f64 = 1e-12;
pub const CERT_VI_MAX_ITERS: usize = 1_000_000;

#[derive(Debug, thiserror::Error)]
pub enum CertificateError {
    #[error("rollout policy is improper from state {from}; certificate refused")]
    ImproperRollout { from: usize },
    #[error("certainty-equivalent policy is improper from state {from}; certificate refused")]
    ImproperCe { from: usize },
    #[error("policy is improper from state {from}; certificate refused")]
    ImproperPolicy { from: usize },
    #[error("drift violated at state {state}{}", match action { Some(a) => format!(", action {a}"), None => String::new() })]
    DriftViolated { state: usize, action: Option<usize> },
    #[error("Lyapunov function is negative at state {state}")]
    LyapunovNegative { state: usize },
    #[error("drift constant must be positive (got {0})")]
    DriftConstantNotPositive(f64),
    #[error("multiplicative minimum-time certificate inapplicable: 2(eps+delta) = {amplification} >= 1")]
    FactorTooLarge { amplification: f64 },
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

// ---------------------------------------------------------------------------
// Report types
// ---------------------------------------------------------------------------

/// One recorded comparison: passes iff `lhs <= rhs`; `slack = rhs - lhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

fn check(name: &str, lhs: f64, rhs: f64) -> Check {
    Check {
        name: name.to_string(),
        passed: lhs <= rhs,
        lhs,
        rhs,
        slack: rhs - lhs,
    }
}

/// Which states entered the sup defining ε.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonMode {
    /// Sup over every state.
    Global,
    /// Sup over the closed loop's reachable states and their one-step
    /// successors under every admissible action.
    Reachable,
}

/// Everything a certificate computed, with per-check pass/fail flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    /// Hash of the kernel-form model the certificate ran on.
    pub model_hash: String,
    pub start: usize,
    /// Certified policy as per-state action indices.
    pub policy: Vec<usize>,
    /// Properness of the certified closed loop (always true in an issued
    /// report; refusals are errors).
    pub proper: bool,
    pub epsilon: f64,
    pub epsilon_mode: EpsilonMode,
    pub delta: f64,
    pub eta: f64,
    pub expected_tau: f64,
    pub vstar_at_start: f64,
    pub policy_cost: f64,
    /// `J^π(x) - V*(x)`, clamped to zero when within [`GAP_CLAMP_TOL`] of
    /// zero from below.
    pub gap: f64,
    pub gap_clamped: bool,
    /// `(2(ε+δ) + η)·E[τ]`.
    pub bound_hitting: f64,
    /// `(2(ε+δ) + η)·N` when a uniform hitting bound `N` was supplied.
    pub bound_uniform_n: Option<f64>,
    /// `(2(ε+δ) + η)·L(x)/c` when drift was supplied and verified.
    pub bound_lyapunov: Option<f64>,
    /// `2·Σ_y μ(y)·ε(y)` when the state-dependent variant was requested.
    pub bound_local: Option<f64>,
    /// `|gap - Σ_y μ(y)·A*(y, π(y))|`.
    pub identity_residual: f64,
    /// Transient occupation measure μ per state.
    pub occupation: Vec<f64>,
    pub solver_tol: f64,
    pub solver_iterations: usize,
    pub solver_residual: f64,
    pub checks: Vec<Check>,
}

impl CertificateReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn find_check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Options shared by the certificate entry points.
#[derive(Clone, Debug)]
pub struct CertificateOptions {
    /// Uniform hitting bound `N`, if claimed by the caller.
    pub uniform_n: Option<f64>,
    /// Lyapunov drift certificate input.
    pub lyapunov: Option<Lyapunov>,
    /// Restrict ε to the reachable closure instead of the global sup.
    pub reachable_epsilon: bool,
    /// Also compute the occupation-weighted state-dependent error bound.
    pub local_error: bool,
    pub solver_tol: f64,
    pub solver_max_iters: usize,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self {
            uniform_n: None,
            lyapunov: None,
            reachable_epsilon: false,
            local_error: false,
            solver_tol: CERT_VI_TOL,
            solver_max_iters: CERT_VI_MAX_ITERS,
        }
    }
}

/// Candidate Lyapunov function with drift constant.
#[derive(Clone, Debug)]
pub struct Lyapunov {
    /// Nonnegative per-state values.
    pub values: Vec<f64>,
    /// Required expected decrease per nonterminal step.
    pub c: f64,
    /// Check the drift for every admissible action rather than only the
    /// policy's action.
    pub uniform: bool,
}

// ---------------------------------------------------------------------------
// ε
// ---------------------------------------------------------------------------

/// Sup-norm approximation error `max |V(y) - V*(y)|`, optionally
/// restricted to the states where `restrict` is true.
pub fn epsilon_sup(v: &ValueFunction, vstar: &ValueFunction, restrict: Option<&[bool]>) -> f64 {
    v.values()
        .iter()
        .zip(vstar.values())
        .enumerate()
        .filter(|(x, _)| restrict.is_none_or(|set| set[*x]))
        .map(|(_, (a, b))| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Reachable closure used by the restricted ε: states the closed loop can
/// visit plus every one-step successor of those states under any
/// admissible action (all states whose values enter the one-step
/// comparisons along the trajectory).
fn reachable_closure(model: &KernelSsp, pi: &StationaryPolicy, from: StateId) -> Vec<bool> {
    let mut set = closed_loop_reachable(model, pi, from);
    let visited: Vec<StateId> = model
        .states()
        .filter(|x| set[x.index()] && !model.is_terminal(*x))
        .collect();
    for x in visited {
        for u in 0..model.n_actions(x) {
            for &(y, p) in model.row(x, ActionId(u)) {
                if p > 0.0 {
                    set[y.index()] = true;
                }
            }
        }
    }
    set
}

// ---------------------------------------------------------------------------
// Core certificate computation
// ---------------------------------------------------------------------------

enum PolicyKind {
    Rollout,
    CertaintyEquivalent,
    Supplied,
}

impl PolicyKind {
    fn improper_error(&self, from: StateId) -> CertificateError {
        let from = from.index();
        match self {
            PolicyKind::Rollout => CertificateError::ImproperRollout { from },
            PolicyKind::CertaintyEquivalent => CertificateError::ImproperCe { from },
            PolicyKind::Supplied => CertificateError::ImproperPolicy { from },
        }
    }
}

/// Certifies the rollout policy built from `v` on `model`.
pub fn rollout_certificate(
    model: &KernelSsp,
    v: &ValueFunction,
    from: StateId,
    opts: &CertificateOptions,
) -> Result<CertificateReport, CertificateError> {
    let model = model.clone().validated()?;
    v.check_against(&model)?;
    let (pi, _) = greedy_policy(&model, v);
    certify(&model, v, &pi, from, 0.0, 0.0, opts, PolicyKind::Rollout)
}

/// Certifies the certainty-equivalent policy built from `v` on the
/// induced kernel of `d`, adding the model-mismatch term δ to the bound.
pub fn ce_certificate(
    d: &DisturbanceSsp,
    v: &ValueFunction,
    from: StateId,
    opts: &CertificateOptions,
) -> Result<CertificateReport, CertificateError> {
    let d = d.clone().validated()?;
    let kernel = induce_kernel(&d)?;
    v.check_against(&kernel)?;
    let pi = ce_policy(&d, v);
    let delta = if opts.reachable_epsilon {
        let closure = reachable_closure(&kernel, &pi, from);
        crate::rollout::mismatch_delta_on(&d, v, Some(&closure)).delta
    } else {
        mismatch_delta(&d, v).delta
    };
    certify(
        &kernel,
        v,
        &pi,
        from,
        delta,
        0.0,
        opts,
        PolicyKind::CertaintyEquivalent,
    )
}

/// Certifies an arbitrary supplied policy, measuring its one-step
/// inexactness η against `v` and widening the bound by `η·E[τ]`.
pub fn policy_certificate(
    model: &KernelSsp,
    v: &ValueFunction,
    pi: &StationaryPolicy,
    from: StateId,
    opts: &CertificateOptions,
) -> Result<CertificateReport, CertificateError> {
    let model = model.clone().validated()?;
    v.check_against(&model)?;
    let eta = eta_inexactness(&model, v, pi).eta;
    certify(&model, v, pi, from, 0.0, eta, opts, PolicyKind::Supplied)
}

#[allow(clippy::too_many_arguments)]
fn certify(
    model: &KernelSsp,
    v: &ValueFunction,
    pi: &StationaryPolicy,
    from: StateId,
    delta: f64,
    eta: f64,
    opts: &CertificateOptions,
    kind: PolicyKind,
) -> Result<CertificateReport, CertificateError> {
    if !properness_check(model, pi, from) {
        return Err(kind.improper_error(from));
    }
    let solved = value_iteration(model, opts.solver_tol, opts.solver_max_iters)?;
    let vstar = &solved.value;

    let (epsilon, epsilon_mode) = if opts.reachable_epsilon {
        let closure = reachable_closure(model, pi, from);
        (epsilon_sup(v, vstar, Some(&closure)), EpsilonMode::Reachable)
    } else {
        (epsilon_sup(v, vstar, None), EpsilonMode::Global)
    };

    let policy_cost = policy_evaluation_exact(model, pi, from)?.value;
    let expected_tau = hitting_time_exact(model, pi, from)?;
    let occupation = occupation_measure(model, pi, from)?;

    let vstar_at_start = vstar.value(from);
    let gap_raw = policy_cost - vstar_at_start;
    let gap_clamped = (-GAP_CLAMP_TOL..0.0).contains(&gap_raw);
    let gap = if gap_clamped { 0.0 } else { gap_raw };

    let amplification = 2.0 * (epsilon + delta) + eta;
    let bound_hitting = amplification * expected_tau;

    // Performance-difference identity: gap = Σ μ(y)·A*(y, π(y)).
    let advantage_sum: f64 = model
        .nonterminal_states()
        .map(|y| occupation.mass[y.index()] * advantage(model, vstar, y, pi.action(y)))
        .sum();
    let identity_residual = (gap_raw - advantage_sum).abs();

    let mut checks = vec![
        check("gap_nonnegative", -gap_raw, GAP_CLAMP_TOL),
        check("gap_within_hitting_bound", gap_raw, bound_hitting + BOUND_TOL),
        check("identity_residual", identity_residual, IDENTITY_TOL),
    ];

    // Per-state one-step inequalities.
    let one_step = one_step_scan(model, v, vstar, pi);
    checks.push(check(
        "residual_bound",
        one_step.max_residual,
        epsilon + ONE_STEP_TOL,
    ));
    checks.push(check(
        "one_step_inequality",
        one_step.max_excess,
        amplification + ONE_STEP_TOL,
    ));

    let bound_uniform_n = opts.uniform_n.map(|n| {
        checks.push(check("tau_within_uniform_n", expected_tau, n + TAU_BOUND_TOL));
        let bound = amplification * n;
        checks.push(check("gap_within_uniform_n_bound", gap_raw, bound + BOUND_TOL));
        bound
    });

    let mut bound_lyapunov = None;
    if let Some(lyap) = &opts.lyapunov {
        let max_violation = drift_scan(model, pi, &lyap.values, lyap.c, from, lyap.uniform)?;
        checks.push(check("lyapunov_drift", max_violation, DRIFT_TOL));
        let tau_bound = lyap.values[from.index()] / lyap.c;
        checks.push(check(
            "tau_within_lyapunov_bound",
            expected_tau,
            tau_bound + TAU_BOUND_TOL,
        ));
        let bound = amplification * tau_bound;
        checks.push(check("gap_within_lyapunov_bound", gap_raw, bound + BOUND_TOL));
        bound_lyapunov = Some(bound);
    }

    let mut bound_local = None;
    if opts.local_error {
        let local = local_error_scan(model, v, vstar, pi, from, &occupation.mass);
        checks.push(check(
            "local_bound_below_uniform",
            local.bound,
            2.0 * (epsilon + delta) * expected_tau + LOCAL_UNIFORM_TOL,
        ));
        if local.one_step_holds {
            checks.push(check("gap_within_local_bound", gap_raw, local.bound + BOUND_TOL));
        }
        bound_local = Some(local.bound);
    }

    Ok(CertificateReport {
        model_hash: kernel_hash(model),
        start: from.index(),
        policy: pi.choices().iter().map(|a| a.index()).collect(),
        proper: true,
        epsilon,
        epsilon_mode,
        delta,
        eta,
        expected_tau,
        vstar_at_start,
        policy_cost,
        gap,
        gap_clamped,
        bound_hitting,
        bound_uniform_n,
        bound_lyapunov,
        bound_local,
        identity_residual,
        occupation: occupation.mass,
        solver_tol: opts.solver_tol,
        solver_iterations: solved.iterations,
        solver_residual: solved.residual,
        checks,
    })
}

// ---------------------------------------------------------------------------
// Performance-difference identity
// ---------------------------------------------------------------------------

/// Both sides of the occupation-measure identity for a proper policy.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerformanceDifference {
    /// `J^π(from) - V*(from)`.
    pub lhs: f64,
    /// `Σ_y μ(y)·A*(y, π(y))`.
    pub rhs: f64,
    pub residual: f64,
}

/// Evaluates the identity `J^π(x) - V*(x) = Σ_y μ(y)·A*(y, π(y))` exactly.
pub fn performance_difference(
    model: &KernelSsp,
    pi: &StationaryPolicy,
    from: StateId,
) -> Result<PerformanceDifference, CertificateError> {
    let model = model.clone().validated()?;
    if !properness_check(&model, pi, from) {
        return Err(CertificateError::ImproperPolicy { from: from.index() });
    }
    let solved = value_iteration(&model, CERT_VI_TOL, CERT_VI_MAX_ITERS)?;
    let lhs = policy_evaluation_exact(&model, pi, from)?.value - solved.value.value(from);
    let occupation = occupation_measure(&model, pi, from)?;
    let rhs: f64 = model
        .nonterminal_states()
        .map(|y| occupation.mass[y.index()] * advantage(&model, &solved.value, y, pi.action(y)))
        .sum();
    Ok(PerformanceDifference {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

// ---------------------------------------------------------------------------
// One-step inequality checks
// ---------------------------------------------------------------------------

/// Per-state report of the residual bound `|(TV)(x) - V*(x)| ≤ ε` and the
/// one-step rollout inequality
/// `E[f(x, π_R(x)) + V*(next)] ≤ V*(x) + 2ε`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OneStepReport {
    pub epsilon: f64,
    /// `max_x |(TV)(x) - V*(x)|`; at most ε up to solver tolerance.
    pub max_residual: f64,
    /// `max_x (E[f + V*∘F](x, π_R(x)) - V*(x))`; at most 2ε up to solver
    /// tolerance.
    pub max_excess: f64,
    pub per_state_residual: Vec<f64>,
    pub per_state_excess: Vec<f64>,
    /// False iff some state violates either inequality beyond
    /// [`ONE_STEP_TOL`], which indicates solver inconsistency.
    pub ok: bool,
}

struct OneStepScan {
    max_residual: f64,
    max_excess: f64,
    per_state_residual: Vec<f64>,
    per_state_excess: Vec<f64>,
}

fn one_step_scan(
    model: &KernelSsp,
    v: &ValueFunction,
    vstar: &ValueFunction,
    pi: &StationaryPolicy,
) -> OneStepScan {
    let (tv, _) = bellman_apply(model, v);
    let n = model.n_states();
    let mut per_state_residual = vec![0.0; n];
    let mut per_state_excess = vec![0.0; n];
    let mut max_residual: f64 = 0.0;
    let mut max_excess = f64::NEG_INFINITY;
    for x in model.states() {
        let residual = (tv.value(x) - vstar.value(x)).abs();
        per_state_residual[x.index()] = residual;
        max_residual = max_residual.max(residual);
        if !model.is_terminal(x) {
            let excess = q_value(model, vstar, x, pi.action(x)) - vstar.value(x);
            per_state_excess[x.index()] = excess;
            max_excess = max_excess.max(excess);
        }
    }
    if max_excess == f64::NEG_INFINITY {
        max_excess = 0.0;
    }
    OneStepScan {
        max_residual,
        max_excess,
        per_state_residual,
        per_state_excess,
    }
}

/// Verifies the two one-step inequalities for the rollout policy of `v` at
/// every state of the model.
pub fn one_step_checks(model: &KernelSsp, v: &ValueFunction) -> Result<OneStepReport, CertificateError> {
    let model = model.clone().validated()?;
    v.check_against(&model)?;
    let solved = value_iteration(&model, CERT_VI_TOL, CERT_VI_MAX_ITERS)?;
    let (pi, _) = greedy_policy(&model, v);
    let epsilon = epsilon_sup(v, &solved.value, None);
    let scan = one_step_scan(&model, v, &solved.value, &pi);
    let ok = scan.max_residual <= epsilon + ONE_STEP_TOL
        && scan.max_excess <= 2.0 * epsilon + ONE_STEP_TOL;
    Ok(OneStepReport {
        epsilon,
        max_residual: scan.max_residual,
        max_excess: scan.max_excess,
        per_state_residual: scan.per_state_residual,
        per_state_excess: scan.per_state_excess,
        ok,
    })
}

// ---------------------------------------------------------------------------
// Lyapunov drift
// ---------------------------------------------------------------------------

/// Outcome of a verified drift condition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LyapunovCertificate {
    /// `L(from)/c`.
    pub certified_tau_bound: f64,
    pub expected_tau: f64,
    /// `E[τ] ≤ L(from)/c` within [`TAU_BOUND_TOL`]; a failure here
    /// indicates an implementation bug, not a modeling problem.
    pub tau_within_bound: bool,
}

/// Maximum violation `E[L(next)] - (L(x) - c)` over the checked pairs, or
/// the first offender as an error.
fn drift_scan(
    model: &KernelSsp,
    pi: &StationaryPolicy,
    l: &[f64],
    c: f64,
    from: StateId,
    uniform: bool,
) -> Result<f64, CertificateError> {
    if c <= 0.0 || c.is_nan() {
        return Err(CertificateError::DriftConstantNotPositive(c));
    }
    if let Some(state) = l.iter().position(|&v| v < 0.0 || v.is_nan()) {
        return Err(CertificateError::LyapunovNegative { state });
    }
    let reachable = closed_loop_reachable(model, pi, from);
    let mut max_violation: f64 = f64::NEG_INFINITY;
    for x in model.nonterminal_states() {
        if !reachable[x.index()] {
            continue;
        }
        let actions: Vec<ActionId> = if uniform {
            (0..model.n_actions(x)).map(ActionId).collect()
        } else {
            vec![pi.action(x)]
        };
        for u in actions {
            let mut expected = 0.0;
            for &(y, p) in model.row(x, u) {
                expected += p * l[y.index()];
            }
            let violation = expected - (l[x.index()] - c);
            if violation > DRIFT_TOL {
                return Err(CertificateError::DriftViolated {
                    state: x.index(),
                    action: if uniform { Some(u.index()) } else { None },
                });
            }
            max_violation = max_violation.max(violation);
        }
    }
    Ok(if max_violation == f64::NEG_INFINITY {
        0.0
    } else {
        max_violation
    })
}

/// Verifies `Σ_y p(y|x, π(x)) L(y) ≤ L(x) - c` at every nonterminal state
/// reachable from `from` (for every admissible action when `uniform`) and
/// returns the certified hitting-time bound `L(from)/c`, cross-checked
/// against the exact hitting time.
pub fn lyapunov_check(
    model: &KernelSsp,
    pi: &StationaryPolicy,
    l: &[f64],
    c: f64,
    from: StateId,
    uniform: bool,
) -> Result<LyapunovCertificate, CertificateError> {
    let model = model.clone().validated()?;
    drift_scan(&model, pi, l, c, from, uniform)?;
    let certified_tau_bound = l[from.index()] / c;
    let expected_tau = hitting_time_exact(&model, pi, from).map_err(|e| match e {
        SolveError::ImproperPolicy { from } => CertificateError::ImproperPolicy { from },
        other => CertificateError::Solve(other),
    })?;
    Ok(LyapunovCertificate {
        certified_tau_bound,
        expected_tau,
        tau_within_bound: expected_tau <= certified_tau_bound + TAU_BOUND_TOL,
    })
}

// ---------------------------------------------------------------------------
// State-dependent (occupation-weighted) error bound
// ---------------------------------------------------------------------------

/// Occupation-weighted error bound `2·Σ_y μ(y)·ε(y)` with
/// `ε(y) = |V(y) - V*(y)|`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalErrorReport {
    pub bound: f64,
    /// Uniform counterpart `2·ε·E[τ]`.
    pub uniform_bound: f64,
    pub per_state_eps: Vec<f64>,
    /// True iff the local one-step inequality
    /// `E[f + V*∘F](x, π_R(x)) ≤ V*(x) + 2ε(x)` held at every reachable
    /// state, which is what makes the local bound a certified upper bound
    /// on the gap.
    pub one_step_holds: bool,
}

struct LocalScan {
    bound: f64,
    per_state_eps: Vec<f64>,
    one_step_holds: bool,
}

fn local_error_scan(
    model: &KernelSsp,
    v: &ValueFunction,
    vstar: &ValueFunction,
    pi: &StationaryPolicy,
    from: StateId,
    mass: &[f64],
) -> LocalScan {
    let per_state_eps: Vec<f64> = v
        .values()
        .iter()
        .zip(vstar.values())
        .map(|(a, b)| (a - b).abs())
        .collect();
    let bound = 2.0
        * model
            .nonterminal_states()
            .map(|y| mass[y.index()] * per_state_eps[y.index()])
            .sum::<f64>();
    let reachable = closed_loop_reachable(model, pi, from);
    let one_step_holds = model.nonterminal_states().all(|x| {
        if !reachable[x.index()] {
            return true;
        }
        let excess = q_value(model, vstar, x, pi.action(x)) - vstar.value(x);
        excess <= 2.0 * per_state_eps[x.index()] + ONE_STEP_TOL
    });
    LocalScan {
        bound,
        per_state_eps,
        one_step_holds,
    }
}

/// Computes the state-dependent bound for the rollout policy of `v`,
/// reported side by side with the uniform bound.
pub fn local_error_bound(
    model: &KernelSsp,
    v: &ValueFunction,
    from: StateId,
) -> Result<LocalErrorReport, CertificateError> {
    let model = model.clone().validated()?;
    v.check_against(&model)?;
    let (pi, _) = greedy_policy(&model, v);
    if !properness_check(&model, &pi, from) {
        return Err(CertificateError::ImproperRollout { from: from.index() });
    }
    let solved = value_iteration(&model, CERT_VI_TOL, CERT_VI_MAX_ITERS)?;
    let occupation = occupation_measure(&model, &pi, from)?;
    let expected_tau = hitting_time_exact(&model, &pi, from)?;
    let epsilon = epsilon_sup(v, &solved.value, None);
    let scan = local_error_scan(&model, v, &solved.value, &pi, from, &occupation.mass);
    Ok(LocalErrorReport {
        bound: scan.bound,
        uniform_bound: 2.0 * epsilon * expected_tau,
        per_state_eps: scan.per_state_eps,
        one_step_holds: scan.one_step_holds,
    })
}

// ---------------------------------------------------------------------------
// Minimum expected hitting time
// ---------------------------------------------------------------------------

/// Options for the minimum-time certificate.
#[derive(Clone, Debug, Default)]
pub struct MinTimeOptions {
    pub uniform_n: Option<f64>,
    pub lyapunov: Option<Lyapunov>,
}

/// Multiplicative and additive arrival-time certificates for unit-cost
/// models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinTimeReport {
    pub model_hash: String,
    pub start: usize,
    pub policy: Vec<usize>,
    /// Minimum expected hitting time `H*(start)` of the unit-cost model.
    pub h_star: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub expected_tau: f64,
    /// `2(ε+δ)`.
    pub amplification: f64,
    /// `H*(start) / (1 - 2(ε+δ))` when the amplification is below 1.
    pub bound_multiplicative: Option<f64>,
    /// `bound_multiplicative - H*(start)`: the certified excess arrival
    /// time, which scales linearly with `H*`.
    pub certified_excess: Option<f64>,
    /// `H*(start) + 2N(ε+δ)` when a uniform hitting bound was supplied.
    pub bound_additive_n: Option<f64>,
    /// `H*(start) + 2(ε+δ)·L(start)/c` when drift was supplied and held.
    pub bound_additive_lyapunov: Option<f64>,
    pub checks: Vec<Check>,
}

impl MinTimeReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Certifies the expected arrival time of the rollout policy built from
/// `v` on the unit-cost rewrite of `model` (idempotent for models that
/// already have unit costs).
pub fn min_time_certificate(
    model: &KernelSsp,
    v: &ValueFunction,
    from: StateId,
    opts: &MinTimeOptions,
) -> Result<MinTimeReport, CertificateError> {
    let unit = unit_cost(&model.clone().validated()?);
    v.check_against(&unit)?;
    let (pi, _) = greedy_policy(&unit, v);
    min_time_certify(&unit, v, &pi, from, 0.0, opts, PolicyKind::Rollout)
}

/// Certainty-equivalent variant: the policy plans against the nominal
/// disturbance of `d` with unit stage costs, and the mismatch δ joins ε in
/// the amplification factor.
pub fn min_time_certificate_ce(
    d: &DisturbanceSsp,
    v: &ValueFunction,
    from: StateId,
    opts: &MinTimeOptions,
) -> Result<MinTimeReport, CertificateError> {
    let d = unit_cost_disturbance(&d.clone().validated()?);
    let unit = unit_cost(&induce_kernel(&d)?);
    v.check_against(&unit)?;
    let pi = ce_policy(&d, v);
    let delta = mismatch_delta(&d, v).delta;
    min_time_certify(&unit, v, &pi, from, delta, opts, PolicyKind::CertaintyEquivalent)
}

fn unit_cost_disturbance(d: &DisturbanceSsp) -> DisturbanceSsp {
    let costs: Vec<Vec<f64>> = d
        .states()
        .map(|x| {
            let value = if d.is_terminal(x) { 0.0 } else { 1.0 };
            vec![value; d.n_actions(x)]
        })
        .collect();
    let actions: Vec<Vec<String>> = d.states().map(|x| d.actions(x).to_vec()).collect();
    let successors: Vec<Vec<Vec<StateId>>> = d
        .states()
        .map(|x| {
            (0..d.n_actions(x))
                .map(|u| {
                    (0..d.n_disturbances())
                        .map(|w| d.successor(x, ActionId(u), w))
                        .collect()
                })
                .collect()
        })
        .collect();
    DisturbanceSsp::from_parts(
        d.n_states(),
        d.terminal(),
        actions,
        costs,
        d.disturbance_labels().to_vec(),
        d.disturbance_probs().to_vec(),
        d.nominal(),
        successors,
    )
    .expect("shape preserved")
}

fn min_time_certify(
    unit: &KernelSsp,
    v: &ValueFunction,
    pi: &StationaryPolicy,
    from: StateId,
    delta: f64,
    opts: &MinTimeOptions,
    kind: PolicyKind,
) -> Result<MinTimeReport, CertificateError> {
    if !properness_check(unit, pi, from) {
        return Err(kind.improper_error(from));
    }
    let solved: SolveResult = value_iteration(unit, CERT_VI_TOL, CERT_VI_MAX_ITERS)?;
    let h_star_fn = &solved.value;
    let epsilon = epsilon_sup(v, h_star_fn, None);
    let h_star = h_star_fn.value(from);
    let expected_tau = hitting_time_exact(unit, pi, from)?;
    let amplification = 2.0 * (epsilon + delta);

    let mut checks = vec![check(
        "tau_excess_within_hitting_bound",
        expected_tau - h_star,
        amplification * expected_tau + BOUND_TOL,
    )];

    let (bound_multiplicative, certified_excess) = if amplification < 1.0 {
        let bound = h_star / (1.0 - amplification);
        checks.push(check(
            "tau_within_multiplicative_bound",
            expected_tau,
            bound + TAU_BOUND_TOL,
        ));
        (Some(bound), Some(bound - h_star))
    } else if opts.uniform_n.is_none() && opts.lyapunov.is_none() {
        return Err(CertificateError::FactorTooLarge { amplification });
    } else {
        (None, None)
    };

    let bound_additive_n = opts.uniform_n.map(|n| {
        checks.push(check("tau_within_uniform_n", expected_tau, n + TAU_BOUND_TOL));
        let bound = h_star + amplification * n;
        checks.push(check("tau_within_additive_n_bound", expected_tau, bound + BOUND_TOL));
        bound
    });

    let mut bound_additive_lyapunov = None;
    if let Some(lyap) = &opts.lyapunov {
        drift_scan(unit, pi, &lyap.values, lyap.c, from, lyap.uniform)?;
        let tau_bound = lyap.values[from.index()] / lyap.c;
        checks.push(check(
            "tau_within_lyapunov_bound",
            expected_tau,
            tau_bound + TAU_BOUND_TOL,
        ));
        let bound = h_star + amplification * tau_bound;
        checks.push(check(
            "tau_within_additive_lyapunov_bound",
            expected_tau,
            bound + BOUND_TOL,
        ));
        bound_additive_lyapunov = Some(bound);
    }

    Ok(MinTimeReport {
        model_hash: kernel_hash(unit),
        start: from.index(),
        policy: pi.choices().iter().map(|a| a.index()).collect(),
        h_star,
        epsilon,
        delta,
        expected_tau,
        amplification,
        bound_multiplicative,
        certified_excess,
        bound_additive_n,
        bound_additive_lyapunov,
        checks,
    })
}
