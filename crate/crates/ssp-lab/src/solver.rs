//! Exact dynamic programming on finite SSP models.
//!
//! Everything here is computed to solver precision rather than sampled:
//! the Bellman operator and its fixed point, exact policy evaluation and
//! expected hitting times through the closed-loop linear system
//! `(I - Q_π) J = f_π`, transient occupation measures through the adjoint
//! system, and the optimal state-control advantage.
//!
//! Properness is decided structurally before any linear algebra runs: a
//! policy is proper from a start state iff every state reachable in its
//! closed loop can still reach the terminal state. Improper inputs are
//! reported as errors, never as floating infinities, so downstream
//! certificate code cannot silently multiply by a divergent hitting time.

use nalgebra::{DMatrix, DVector};

use crate::model::{ActionId, KernelSsp, StateId, StationaryPolicy, ValueFunction};

/// Default sup-norm tolerance for value iteration.
pub const DEFAULT_VI_TOL: f64 = 1e-10;
/// Default iteration cap for value iteration.
pub const DEFAULT_VI_MAX_ITERS: usize = 1_000_000;

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("no proper policy exists: state {state} cannot reach the terminal state under any action")]
    NoProperPolicy { state: usize },
    #[error("value iteration did not converge: residual {residual} after {iterations} iterations")]
    NotConverged { residual: f64, iterations: usize },
    #[error("policy is improper from state {from}: terminal state is not reached almost surely")]
    ImproperPolicy { from: usize },
    #[error("closed-loop linear system is singular (numerical pathology)")]
    SingularSystem,
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

// ---------------------------------------------------------------------------
// Bellman operator
// ---------------------------------------------------------------------------

/// One-step cost-plus-continuation score `Q_V(x, u) = f(x,u) + Σ_y p(y|x,u) V(y)`.
pub(crate) fn q_value(model: &KernelSsp, v: &ValueFunction, x: StateId, u: ActionId) -> f64 {
    let mut expected = 0.0;
    for &(y, p) in model.row(x, u) {
        expected += p * v.value(y);
    }
    model.cost(x, u) + expected
}

/// Scans the admissible actions of `x` and returns the minimizing action
/// (lowest index on ties), its score, and the runner-up score (infinite
/// when the state has a single action). Shared by the Bellman operator and
/// the greedy-policy construction so their scores agree bit for bit.
pub(crate) fn best_action(
    model: &KernelSsp,
    v: &ValueFunction,
    x: StateId,
) -> (ActionId, f64, f64) {
    let mut best = ActionId(0);
    let mut best_q = f64::INFINITY;
    let mut runner_up = f64::INFINITY;
    for u in 0..model.n_actions(x) {
        let q = q_value(model, v, x, ActionId(u));
        if q < best_q {
            runner_up = best_q;
            best_q = q;
            best = ActionId(u);
        } else if q < runner_up {
            runner_up = q;
        }
    }
    (best, best_q, runner_up)
}

/// Applies the Bellman operator once: `(TV)(x) = min_u Q_V(x, u)` at
/// nonterminal states and `(TV)(t) = 0`, together with a greedy policy for
/// `V` (lowest action index on ties).
pub fn bellman_apply(model: &KernelSsp, v: &ValueFunction) -> (ValueFunction, StationaryPolicy) {
    let n = model.n_states();
    let mut out = vec![0.0; n];
    let mut choice = vec![ActionId(0); n];
    for x in model.nonterminal_states() {
        let (u, q, _) = best_action(model, v, x);
        out[x.index()] = q;
        choice[x.index()] = u;
    }
    (
        ValueFunction::new(out, model.terminal()).expect("terminal pinned to zero"),
        StationaryPolicy::from_choices_unchecked(choice),
    )
}

// ---------------------------------------------------------------------------
// Value iteration
// ---------------------------------------------------------------------------

/// Result of a converged value-iteration solve.
#[derive(Clone, Debug)]
pub struct SolveResult {
    /// Fixed-point value, accurate to the solve tolerance.
    pub value: ValueFunction,
    /// A Bellman-greedy policy for `value`.
    pub greedy: StationaryPolicy,
    pub iterations: usize,
    /// Sup-norm of the final Bellman update.
    pub residual: f64,
}

/// Computes the optimal value by iterating the Bellman operator from
/// `V ≡ 0` (iterates are monotone nondecreasing for nonnegative costs).
///
/// Before iterating, checks structurally that every state can reach the
/// terminal state under some action sequence; models violating this have
/// no proper policy from the offending state and are rejected.
pub fn value_iteration(
    model: &KernelSsp,
    tol: f64,
    max_iters: usize,
) -> Result<SolveResult, SolveError> {
    if let Some(state) = unreachable_terminal_state(model) {
        return Err(SolveError::NoProperPolicy {
            state: state.index(),
        });
    }
    let mut v = ValueFunction::zeros(model.n_states());
    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iters {
        let (next, greedy) = bellman_apply(model, &v);
        residual = next.sup_distance(&v);
        v = next;
        if residual < tol {
            return Ok(SolveResult {
                value: v,
                greedy,
                iterations: iteration,
                residual,
            });
        }
    }
    Err(SolveError::NotConverged {
        residual,
        iterations: max_iters,
    })
}

/// Convenience wrapper with the default tolerance and iteration cap.
pub fn solve_optimal(model: &KernelSsp) -> Result<SolveResult, SolveError> {
    value_iteration(model, DEFAULT_VI_TOL, DEFAULT_VI_MAX_ITERS)
}

/// First state (lowest index) from which the terminal state is unreachable
/// in the union graph over all actions, if any.
fn unreachable_terminal_state(model: &KernelSsp) -> Option<StateId> {
    let n = model.n_states();
    // Reverse reachability from t over positive-probability edges of any action.
    let mut predecessors: Vec<Vec<usize>> = vec![Vec::new(); n];
    for x in model.states() {
        for u in 0..model.n_actions(x) {
            for &(y, p) in model.row(x, ActionId(u)) {
                if p > 0.0 {
                    predecessors[y.index()].push(x.index());
                }
            }
        }
    }
    let mut can_reach = vec![false; n];
    let mut stack = vec![model.terminal().index()];
    can_reach[model.terminal().index()] = true;
    while let Some(y) = stack.pop() {
        for &x in &predecessors[y] {
            if !can_reach[x] {
                can_reach[x] = true;
                stack.push(x);
            }
        }
    }
    can_reach.iter().position(|&ok| !ok).map(StateId)
}

// ---------------------------------------------------------------------------
// Closed-loop structure
// ---------------------------------------------------------------------------

/// States reachable from `from` (inclusive) under the closed loop of `pi`,
/// following positive-probability edges only.
pub fn closed_loop_reachable(model: &KernelSsp, pi: &StationaryPolicy, from: StateId) -> Vec<bool> {
    let n = model.n_states();
    let mut reachable = vec![false; n];
    let mut stack = vec![from.index()];
    reachable[from.index()] = true;
    while let Some(x) = stack.pop() {
        let x = StateId(x);
        if model.is_terminal(x) {
            continue;
        }
        for &(y, p) in model.row(x, pi.action(x)) {
            if p > 0.0 && !reachable[y.index()] {
                reachable[y.index()] = true;
                stack.push(y.index());
            }
        }
    }
    reachable
}

/// True iff `pi` is proper from `from`: every state its closed loop can
/// reach still has a positive-probability path to the terminal state. On
/// finite chains this is equivalent to almost-sure absorption, and finite
/// expected cost follows from bounded stage costs.
pub fn properness_check(model: &KernelSsp, pi: &StationaryPolicy, from: StateId) -> bool {
    let reachable = closed_loop_reachable(model, pi, from);
    let n = model.n_states();
    let mut predecessors: Vec<Vec<usize>> = vec![Vec::new(); n];
    for x in model.nonterminal_states() {
        if !reachable[x.index()] {
            continue;
        }
        for &(y, p) in model.row(x, pi.action(x)) {
            if p > 0.0 {
                predecessors[y.index()].push(x.index());
            }
        }
    }
    let mut absorbed = vec![false; n];
    let mut stack = vec![model.terminal().index()];
    absorbed[model.terminal().index()] = true;
    while let Some(y) = stack.pop() {
        for &x in &predecessors[y] {
            if !absorbed[x] {
                absorbed[x] = true;
                stack.push(x);
            }
        }
    }
    (0..n).all(|x| !reachable[x] || absorbed[x])
}

// ---------------------------------------------------------------------------
// Closed-loop linear systems
// ---------------------------------------------------------------------------

/// Nonterminal states reachable from `from` under `pi`, in index order,
/// after a successful properness check.
struct ClosedLoop {
    states: Vec<StateId>,
    /// Dense position of each state within `states`; usize::MAX elsewhere.
    position: Vec<usize>,
}

fn closed_loop_system(
    model: &KernelSsp,
    pi: &StationaryPolicy,
    from: StateId,
) -> Result<ClosedLoop, SolveError> {
    if !properness_check(model, pi, from) {
        return Err(SolveError::ImproperPolicy { from: from.index() });
    }
    let reachable = closed_loop_reachable(model, pi, from);
    let states: Vec<StateId> = model
        .nonterminal_states()
        .filter(|x| reachable[x.index()])
        .collect();
    let mut position = vec![usize::MAX; model.n_states()];
    for (i, &x) in states.iter().enumerate() {
        position[x.index()] = i;
    }
    Ok(ClosedLoop { states, position })
}

/// Builds `I - Q_π` restricted to the reachable nonterminal states.
fn transient_matrix(model: &KernelSsp, pi: &StationaryPolicy, loop_: &ClosedLoop) -> DMatrix<f64> {
    let r = loop_.states.len();
    let mut a = DMatrix::<f64>::identity(r, r);
    for (i, &x) in loop_.states.iter().enumerate() {
        for &(y, p) in model.row(x, pi.action(x)) {
            if !model.is_terminal(y) && p > 0.0 {
                let j = loop_.position[y.index()];
                debug_assert_ne!(j, usize::MAX, "closed loop leaks outside reachable set");
                a[(i, j)] -= p;
            }
        }
    }
    a
}

fn lu_solve(a: DMatrix<f64>, b: DVector<f64>) -> Result<DVector<f64>, SolveError> {
    a.lu().solve(&b).ok_or(SolveError::SingularSystem)
}

/// Exact total cost of `pi` from `from`, with the per-state cost array for
/// every state solved along the way.
#[derive(Clone, Debug)]
pub struct PolicyValue {
    pub from: StateId,
    /// `J^π(from)`.
    pub value: f64,
    /// Per-state costs; NaN at nonterminal states not reachable from
    /// `from` (the solve is restricted to the closed loop's reachable set).
    pub values: Vec<f64>,
}

/// Solves `(I - Q_π) J = f_π` over the nonterminal states reachable from
/// `from` by dense LU with partial pivoting; `J(t) = 0`.
pub fn policy_evaluation_exact(
    model: &KernelSsp,
    pi: &StationaryPolicy,
    from: StateId,
) -> Result<PolicyValue, SolveError> {
    let loop_ = closed_loop_system(model, pi, from)?;
    let mut values = vec![f64::NAN; model.n_states()];
    values[model.terminal().index()] = 0.0;
    if !loop_.states.is_empty() {
        let a = transient_matrix(model, pi, &loop_);
        let b = DVector::from_iterator(
            loop_.states.len(),
            loop_.states.iter().map(|&x| model.cost(x, pi.action(x))),
        );
        let j = lu_solve(a, b)?;
        for (i, &x) in loop_.states.iter().enumerate() {
            values[x.index()] = j[i];
        }
    }
    Ok(PolicyValue {
        from,
        value: values[from.index()],
        values,
    })
}

/// Expected hitting time of the terminal state under `pi` from `from`,
/// solving `(I - Q_π) h = 1`. Equals `policy_evaluation_exact` on the
/// unit-cost rewrite of the model.
pub fn hitting_time_exact(
    model: &KernelSsp,
    pi: &StationaryPolicy,
    from: StateId,
) -> Result<f64, SolveError> {
    let loop_ = closed_loop_system(model, pi, from)?;
    if loop_.states.is_empty() {
        return Ok(0.0);
    }
    let a = transient_matrix(model, pi, &loop_);
    let b = DVector::from_element(loop_.states.len(), 1.0);
    let h = lu_solve(a, b)?;
    Ok(h[loop_.position[from.index()]])
}

/// Expected number of pre-absorption visits to each nonterminal state.
#[derive(Clone, Debug)]
pub struct OccupationMeasure {
    pub start: StateId,
    /// `μ(y) = E[Σ_{k<τ} 1{x_k = y}]`; zero at the terminal state and at
    /// states the closed loop cannot reach.
    pub mass: Vec<f64>,
}

impl OccupationMeasure {
    /// Total mass `Σ_y μ(y)`, which equals the expected hitting time.
    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }
}

/// Solves the adjoint system `μᵀ (I - Q_π) = e_fromᵀ` over the reachable
/// nonterminal states.
pub fn occupation_measure(
    model: &KernelSsp,
    pi: &StationaryPolicy,
    from: StateId,
) -> Result<OccupationMeasure, SolveError> {
    let loop_ = closed_loop_system(model, pi, from)?;
    let mut mass = vec![0.0; model.n_states()];
    if !loop_.states.is_empty() {
        let a = transient_matrix(model, pi, &loop_).transpose();
        let mut b = DVector::zeros(loop_.states.len());
        b[loop_.position[from.index()]] = 1.0;
        let mu = lu_solve(a, b)?;
        for (i, &x) in loop_.states.iter().enumerate() {
            mass[x.index()] = mu[i];
        }
    }
    Ok(OccupationMeasure { start: from, mass })
}

/// Optimal state-control advantage
/// `A*(x, u) = f(x, u) + Σ_y p(y|x,u) V*(y) - V*(x)`; zero at optimal
/// actions and nonnegative everywhere up to solver tolerance.
pub fn advantage(model: &KernelSsp, vstar: &ValueFunction, x: StateId, u: ActionId) -> f64 {
    q_value(model, vstar, x, u) - vstar.value(x)
}
