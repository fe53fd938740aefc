//! Finite stochastic-shortest-path models and the containers shared by
//! every other module.
//!
//! Two equivalent model representations are supported:
//!
//! - [`KernelSsp`] is the transition-kernel form: for each nonterminal state and
//!   admissible action, a sparse probability row `p(y | x, u)` over
//!   successor states plus a nonnegative stage cost `f(x, u)`.
//! - [`DisturbanceSsp`] is the generative form: a successor function
//!   `F(x, u, w)` over a finite disturbance distribution `q(w)` with a
//!   designated nominal disturbance, convertible to kernel form by
//!   [`induce_kernel`].
//!
//! The terminal state is an explicit reserved index with one mandatory
//! stop action that self-loops with probability 1 at zero cost. Models are
//! plain data: [`validate`] reports every invariant violation as data
//! rather than failing, and `validated()` on either form rejects invalid
//! models and renormalizes probability rows that are within tolerance.
//!
//! All model types are immutable after construction and safe to share
//! across threads.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Probability rows must sum to 1 within this tolerance to be accepted;
/// accepted rows are then renormalized exactly.
pub const ROW_SUM_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

/// Index of a state. One distinguished index per model is the terminal state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index into the admissible-action list of a given state. Only meaningful
/// relative to that state's ordered action list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionId(pub usize);

impl ActionId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Action index reserved for the terminal state's single stop action.
pub const STOP_ACTION: ActionId = ActionId(0);

// ---------------------------------------------------------------------------
// Errors and validation
// ---------------------------------------------------------------------------

/// Structural problems that make a model impossible to even index safely.
/// Semantic problems (row sums, signs, absorption) are reported by
/// `validate` instead.
#[derive(Clone, Debug, thiserror::Error, PartialEq)]
pub enum ShapeError {
    #[error("n_states must be at least 1")]
    Empty,
    #[error("terminal index {terminal} out of range for {n_states} states")]
    TerminalOutOfRange { terminal: usize, n_states: usize },
    #[error("{table} has {got} state entries, expected {expected}")]
    StateCount {
        table: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("state {state}: {table} has {got} action entries, expected {expected}")]
    ActionCount {
        table: &'static str,
        state: usize,
        got: usize,
        expected: usize,
    },
    #[error("state {state}, action {action}: successor {successor} out of range")]
    SuccessorOutOfRange {
        state: usize,
        action: usize,
        successor: usize,
    },
    #[error("state {state}, action {action}: {got} successor entries, expected one per disturbance ({expected})")]
    DisturbanceCount {
        state: usize,
        action: usize,
        got: usize,
        expected: usize,
    },
    #[error("disturbance labels and probabilities have different lengths ({labels} vs {probs})")]
    DisturbanceLengths { labels: usize, probs: usize },
    #[error("nominal disturbance index {nominal} out of range ({len} disturbances)")]
    NominalOutOfRange { nominal: usize, len: usize },
}

/// Errors raised by model constructors and conversions.
#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("model failed validation:\n{0}")]
    Invalid(ValidationReport),
    #[error("value function has {got} entries, expected {expected}")]
    ValueLength { got: usize, expected: usize },
    #[error("value at terminal state {terminal} is {value}, expected exactly 0")]
    ValueNonzeroAtTerminal { terminal: usize, value: f64 },
    #[error("value at state {state} is not finite")]
    ValueNotFinite { state: usize },
    #[error("policy has {got} entries, expected {expected}")]
    PolicyLength { got: usize, expected: usize },
    #[error("policy selects action {action} at state {state}, which has {available} admissible actions")]
    PolicyActionOutOfRange {
        state: usize,
        action: usize,
        available: usize,
    },
}

/// One invariant violation, with the coordinates needed to locate it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    RowSum {
        state: usize,
        action: usize,
        sum: f64,
    },
    ProbOutOfRange {
        state: usize,
        action: usize,
        successor: usize,
        prob: f64,
    },
    NegativeCost {
        state: usize,
        action: usize,
        cost: f64,
    },
    NoActions {
        state: usize,
    },
    TerminalActionCount {
        count: usize,
    },
    TerminalNotAbsorbing {
        detail: String,
    },
    TerminalCostNonzero {
        cost: f64,
    },
    DisturbanceProbOutOfRange {
        index: usize,
        prob: f64,
    },
    DisturbanceSum {
        sum: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowSum { state, action, sum } => write!(
                f,
                "transition row for state {state}, action {action} sums to {sum}, expected 1"
            ),
            Violation::ProbOutOfRange {
                state,
                action,
                successor,
                prob,
            } => write!(
                f,
                "probability {prob} for state {state}, action {action} -> {successor} outside [0, 1]"
            ),
            Violation::NegativeCost {
                state,
                action,
                cost,
            } => write!(f, "cost {cost} for state {state}, action {action} is negative"),
            Violation::NoActions { state } => {
                write!(f, "nonterminal state {state} has no admissible actions")
            }
            Violation::TerminalActionCount { count } => write!(
                f,
                "terminal state has {count} actions, expected exactly the stop action"
            ),
            Violation::TerminalNotAbsorbing { detail } => {
                write!(f, "terminal state is not absorbing: {detail}")
            }
            Violation::TerminalCostNonzero { cost } => {
                write!(f, "terminal stop action has cost {cost}, expected 0")
            }
            Violation::DisturbanceProbOutOfRange { index, prob } => {
                write!(f, "disturbance {index} has probability {prob} outside [0, 1]")
            }
            Violation::DisturbanceSum { sum } => {
                write!(f, "disturbance probabilities sum to {sum}, expected 1")
            }
        }
    }
}

/// Every invariant violation found in a model. Empty iff the model is valid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            write!(f, "valid")
        } else {
            for (i, v) in self.violations.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "{v}")?;
            }
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Kernel form
// ---------------------------------------------------------------------------

/// A sparse probability row: `(successor, probability)` pairs sorted by
/// successor index. Canonical form for serialization and hashing.
pub type SparseRow = Vec<(StateId, f64)>;

/// Finite SSP in transition-kernel form.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSsp {
    n_states: usize,
    terminal: StateId,
    actions: Vec<Vec<String>>,
    rows: Vec<Vec<SparseRow>>,
    costs: Vec<Vec<f64>>,
}

impl KernelSsp {
    /// Builds a model from raw tables, checking only structural shape
    /// (lengths and index ranges). Rows are sorted by successor and
    /// duplicate successors are merged. Semantic invariants are left to
    /// [`KernelSsp::validate`].
    pub fn from_parts(
        n_states: usize,
        terminal: StateId,
        actions: Vec<Vec<String>>,
        mut rows: Vec<Vec<SparseRow>>,
        costs: Vec<Vec<f64>>,
    ) -> Result<Self, ShapeError> {
        if n_states == 0 {
            return Err(ShapeError::Empty);
        }
        if terminal.index() >= n_states {
            return Err(ShapeError::TerminalOutOfRange {
                terminal: terminal.index(),
                n_states,
            });
        }
        check_state_count("actions", actions.len(), n_states)?;
        check_state_count("transitions", rows.len(), n_states)?;
        check_state_count("costs", costs.len(), n_states)?;
        for x in 0..n_states {
            if rows[x].len() != actions[x].len() {
                return Err(ShapeError::ActionCount {
                    table: "transitions",
                    state: x,
                    got: rows[x].len(),
                    expected: actions[x].len(),
                });
            }
            if costs[x].len() != actions[x].len() {
                return Err(ShapeError::ActionCount {
                    table: "costs",
                    state: x,
                    got: costs[x].len(),
                    expected: actions[x].len(),
                });
            }
            for (u, row) in rows[x].iter_mut().enumerate() {
                for &(y, _) in row.iter() {
                    if y.index() >= n_states {
                        return Err(ShapeError::SuccessorOutOfRange {
                            state: x,
                            action: u,
                            successor: y.index(),
                        });
                    }
                }
                canonicalize_row(row);
            }
        }
        Ok(Self {
            n_states,
            terminal,
            actions,
            rows,
            costs,
        })
    }

    /// Checks every semantic invariant and returns the violations found.
    /// Violations are data, not failures: an invalid model can still be
    /// inspected and printed.
    pub fn validate(&self) -> ValidationReport {
        let mut out = Vec::new();
        let t = self.terminal.index();
        for x in 0..self.n_states {
            if x != t && self.actions[x].is_empty() {
                out.push(Violation::NoActions { state: x });
            }
            for u in 0..self.actions[x].len() {
                let row = &self.rows[x][u];
                let mut sum = 0.0;
                for &(y, p) in row {
                    if !(0.0..=1.0 + ROW_SUM_TOL).contains(&p) {
                        out.push(Violation::ProbOutOfRange {
                            state: x,
                            action: u,
                            successor: y.index(),
                            prob: p,
                        });
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > ROW_SUM_TOL {
                    out.push(Violation::RowSum {
                        state: x,
                        action: u,
                        sum,
                    });
                }
                let cost = self.costs[x][u];
                if cost < 0.0 || cost.is_nan() {
                    out.push(Violation::NegativeCost {
                        state: x,
                        action: u,
                        cost,
                    });
                }
            }
        }
        if self.actions[t].len() != 1 {
            out.push(Violation::TerminalActionCount {
                count: self.actions[t].len(),
            });
        } else {
            let row = &self.rows[t][0];
            let self_mass: f64 = row
                .iter()
                .filter(|&&(y, _)| y == self.terminal)
                .map(|&(_, p)| p)
                .sum();
            if (self_mass - 1.0).abs() > ROW_SUM_TOL
                || row.iter().any(|&(y, p)| y != self.terminal && p > 0.0)
            {
                out.push(Violation::TerminalNotAbsorbing {
                    detail: format!("stop action self-loop mass is {self_mass}"),
                });
            }
            if self.costs[t][0] != 0.0 {
                out.push(Violation::TerminalCostNonzero {
                    cost: self.costs[t][0],
                });
            }
        }
        ValidationReport { violations: out }
    }

    /// Rejects invalid models; on valid ones, renormalizes each probability
    /// row exactly (rows already within [`ROW_SUM_TOL`] of 1). Bad data is
    /// never silently renormalized.
    pub fn validated(mut self) -> Result<Self, ModelError> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(ModelError::Invalid(report));
        }
        for state_rows in &mut self.rows {
            for row in state_rows {
                let mut values: Vec<f64> = row.iter().map(|&(_, p)| p).collect();
                renormalize_exact(&mut values);
                for (entry, p) in row.iter_mut().zip(values) {
                    entry.1 = p;
                }
            }
        }
        Ok(self)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn terminal(&self) -> StateId {
        self.terminal
    }

    pub fn is_terminal(&self, x: StateId) -> bool {
        x == self.terminal
    }

    /// Ordered admissible-action labels of a state.
    pub fn actions(&self, x: StateId) -> &[String] {
        &self.actions[x.index()]
    }

    pub fn n_actions(&self, x: StateId) -> usize {
        self.actions[x.index()].len()
    }

    /// Sparse transition row `p(· | x, u)`.
    pub fn row(&self, x: StateId, u: ActionId) -> &SparseRow {
        &self.rows[x.index()][u.index()]
    }

    /// Stage cost `f(x, u)`.
    pub fn cost(&self, x: StateId, u: ActionId) -> f64 {
        self.costs[x.index()][u.index()]
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.n_states).map(StateId)
    }

    /// States other than the terminal, in index order.
    pub fn nonterminal_states(&self) -> impl Iterator<Item = StateId> + '_ {
        let t = self.terminal;
        (0..self.n_states).map(StateId).filter(move |&x| x != t)
    }
}

fn check_state_count(table: &'static str, got: usize, expected: usize) -> Result<(), ShapeError> {
    if got != expected {
        Err(ShapeError::StateCount {
            table,
            got,
            expected,
        })
    } else {
        Ok(())
    }
}

/// Scales the values to sum to 1 and then pins the last entry so the
/// index-order sum is exactly 1.0. Idempotent: a second pass sees an exact
/// sum and leaves every bit unchanged, so repeated validation cannot drift
/// probabilities by an ulp.
fn renormalize_exact(values: &mut [f64]) {
    let sum: f64 = values.iter().sum();
    if sum == 1.0 {
        return;
    }
    for v in values.iter_mut() {
        *v /= sum;
    }
    let prefix: f64 = values[..values.len() - 1].iter().sum();
    let last = 1.0 - prefix;
    if last >= 0.0 {
        values[values.len() - 1] = last;
    }
}

fn canonicalize_row(row: &mut SparseRow) {
    row.sort_by_key(|&(y, _)| y);
    let mut merged: SparseRow = Vec::with_capacity(row.len());
    for &(y, p) in row.iter() {
        match merged.last_mut() {
            Some(last) if last.0 == y => last.1 += p,
            _ => merged.push((y, p)),
        }
    }
    *row = merged;
}

/// Replaces every nonterminal stage cost by 1 (terminal stays 0), leaving
/// the dynamics bit-exact. The optimal value of the result is the minimum
/// expected hitting time. Idempotent.
pub fn unit_cost(model: &KernelSsp) -> KernelSsp {
    let mut out = model.clone();
    let t = out.terminal.index();
    for (x, costs) in out.costs.iter_mut().enumerate() {
        for c in costs.iter_mut() {
            *c = if x == t { 0.0 } else { 1.0 };
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Disturbance (generative) form
// ---------------------------------------------------------------------------

/// Finite SSP in generative form: `x' = F(x, u, w)` with `w ~ q` i.i.d.
/// over a finite disturbance list, one member of which is the designated
/// nominal disturbance used by certainty-equivalent planning.
#[derive(Clone, Debug, PartialEq)]
pub struct DisturbanceSsp {
    n_states: usize,
    terminal: StateId,
    actions: Vec<Vec<String>>,
    costs: Vec<Vec<f64>>,
    disturbance_labels: Vec<String>,
    disturbance_probs: Vec<f64>,
    nominal: usize,
    successors: Vec<Vec<Vec<StateId>>>,
}

impl DisturbanceSsp {
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        n_states: usize,
        terminal: StateId,
        actions: Vec<Vec<String>>,
        costs: Vec<Vec<f64>>,
        disturbance_labels: Vec<String>,
        disturbance_probs: Vec<f64>,
        nominal: usize,
        successors: Vec<Vec<Vec<StateId>>>,
    ) -> Result<Self, ShapeError> {
        if n_states == 0 {
            return Err(ShapeError::Empty);
        }
        if terminal.index() >= n_states {
            return Err(ShapeError::TerminalOutOfRange {
                terminal: terminal.index(),
                n_states,
            });
        }
        if disturbance_labels.len() != disturbance_probs.len() {
            return Err(ShapeError::DisturbanceLengths {
                labels: disturbance_labels.len(),
                probs: disturbance_probs.len(),
            });
        }
        if nominal >= disturbance_labels.len() {
            return Err(ShapeError::NominalOutOfRange {
                nominal,
                len: disturbance_labels.len(),
            });
        }
        check_state_count("actions", actions.len(), n_states)?;
        check_state_count("costs", costs.len(), n_states)?;
        check_state_count("successors", successors.len(), n_states)?;
        let n_dist = disturbance_labels.len();
        for x in 0..n_states {
            if successors[x].len() != actions[x].len() {
                return Err(ShapeError::ActionCount {
                    table: "successors",
                    state: x,
                    got: successors[x].len(),
                    expected: actions[x].len(),
                });
            }
            if costs[x].len() != actions[x].len() {
                return Err(ShapeError::ActionCount {
                    table: "costs",
                    state: x,
                    got: costs[x].len(),
                    expected: actions[x].len(),
                });
            }
            for (u, by_w) in successors[x].iter().enumerate() {
                if by_w.len() != n_dist {
                    return Err(ShapeError::DisturbanceCount {
                        state: x,
                        action: u,
                        got: by_w.len(),
                        expected: n_dist,
                    });
                }
                for &y in by_w {
                    if y.index() >= n_states {
                        return Err(ShapeError::SuccessorOutOfRange {
                            state: x,
                            action: u,
                            successor: y.index(),
                        });
                    }
                }
            }
        }
        Ok(Self {
            n_states,
            terminal,
            actions,
            costs,
            disturbance_labels,
            disturbance_probs,
            nominal,
            successors,
        })
    }

    pub fn validate(&self) -> ValidationReport {
        let mut out = Vec::new();
        let t = self.terminal.index();
        let mut sum = 0.0;
        for (i, &q) in self.disturbance_probs.iter().enumerate() {
            if !(0.0..=1.0 + ROW_SUM_TOL).contains(&q) {
                out.push(Violation::DisturbanceProbOutOfRange { index: i, prob: q });
            }
            sum += q;
        }
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            out.push(Violation::DisturbanceSum { sum });
        }
        for x in 0..self.n_states {
            if x != t && self.actions[x].is_empty() {
                out.push(Violation::NoActions { state: x });
            }
            for u in 0..self.actions[x].len() {
                let cost = self.costs[x][u];
                if cost < 0.0 || cost.is_nan() {
                    out.push(Violation::NegativeCost {
                        state: x,
                        action: u,
                        cost,
                    });
                }
            }
        }
        if self.actions[t].len() != 1 {
            out.push(Violation::TerminalActionCount {
                count: self.actions[t].len(),
            });
        } else {
            if let Some(w) = self.successors[t][0]
                .iter()
                .position(|&y| y != self.terminal)
            {
                out.push(Violation::TerminalNotAbsorbing {
                    detail: format!("F(t, stop, w{w}) leaves the terminal state"),
                });
            }
            if self.costs[t][0] != 0.0 {
                out.push(Violation::TerminalCostNonzero {
                    cost: self.costs[t][0],
                });
            }
        }
        ValidationReport { violations: out }
    }

    /// Rejects invalid models; renormalizes the disturbance distribution
    /// exactly when it is within [`ROW_SUM_TOL`] of 1.
    pub fn validated(mut self) -> Result<Self, ModelError> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(ModelError::Invalid(report));
        }
        renormalize_exact(&mut self.disturbance_probs);
        Ok(self)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn terminal(&self) -> StateId {
        self.terminal
    }

    pub fn is_terminal(&self, x: StateId) -> bool {
        x == self.terminal
    }

    pub fn actions(&self, x: StateId) -> &[String] {
        &self.actions[x.index()]
    }

    pub fn n_actions(&self, x: StateId) -> usize {
        self.actions[x.index()].len()
    }

    pub fn cost(&self, x: StateId, u: ActionId) -> f64 {
        self.costs[x.index()][u.index()]
    }

    pub fn n_disturbances(&self) -> usize {
        self.disturbance_labels.len()
    }

    pub fn disturbance_labels(&self) -> &[String] {
        &self.disturbance_labels
    }

    pub fn disturbance_probs(&self) -> &[f64] {
        &self.disturbance_probs
    }

    /// Index of the nominal disturbance within the disturbance list.
    pub fn nominal(&self) -> usize {
        self.nominal
    }

    /// Successor `F(x, u, w)`.
    pub fn successor(&self, x: StateId, u: ActionId, w: usize) -> StateId {
        self.successors[x.index()][u.index()][w]
    }

    /// Successor under the nominal disturbance, `F(x, u, w̄)`.
    pub fn nominal_successor(&self, x: StateId, u: ActionId) -> StateId {
        self.successor(x, u, self.nominal)
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.n_states).map(StateId)
    }

    pub fn nonterminal_states(&self) -> impl Iterator<Item = StateId> + '_ {
        let t = self.terminal;
        (0..self.n_states).map(StateId).filter(move |&x| x != t)
    }
}

/// Pushes the disturbance distribution through `F`:
/// `p(y | x, u) = Σ_{w : F(x,u,w) = y} q(w)`. Action sets and costs are
/// copied unchanged; the output passes validation.
pub fn induce_kernel(d: &DisturbanceSsp) -> Result<KernelSsp, ModelError> {
    let d = d.clone().validated()?;
    let mut rows: Vec<Vec<SparseRow>> = Vec::with_capacity(d.n_states);
    for x in d.states() {
        let mut per_action = Vec::with_capacity(d.n_actions(x));
        for u in 0..d.n_actions(x) {
            let mut row: SparseRow = d.successors[x.index()][u]
                .iter()
                .zip(&d.disturbance_probs)
                .map(|(&y, &q)| (y, q))
                .collect();
            canonicalize_row(&mut row);
            per_action.push(row);
        }
        rows.push(per_action);
    }
    let kernel = KernelSsp::from_parts(
        d.n_states,
        d.terminal,
        d.actions.clone(),
        rows,
        d.costs.clone(),
    )
    .expect("shape preserved by construction");
    kernel.validated()
}

/// A model in either representation, as loaded from a model file.
#[derive(Clone, Debug)]
pub enum AnySsp {
    Kernel(KernelSsp),
    Disturbance(DisturbanceSsp),
}

impl AnySsp {
    pub fn validate(&self) -> ValidationReport {
        match self {
            AnySsp::Kernel(m) => m.validate(),
            AnySsp::Disturbance(d) => d.validate(),
        }
    }

    /// Kernel view: the model itself, or the induced kernel of a
    /// disturbance-form model.
    pub fn to_kernel(&self) -> Result<KernelSsp, ModelError> {
        match self {
            AnySsp::Kernel(m) => m.clone().validated(),
            AnySsp::Disturbance(d) => induce_kernel(d),
        }
    }

    pub fn terminal(&self) -> StateId {
        match self {
            AnySsp::Kernel(m) => m.terminal(),
            AnySsp::Disturbance(d) => d.terminal(),
        }
    }

    pub fn n_states(&self) -> usize {
        match self {
            AnySsp::Kernel(m) => m.n_states(),
            AnySsp::Disturbance(d) => d.n_states(),
        }
    }
}

// ---------------------------------------------------------------------------
// Value functions and policies
// ---------------------------------------------------------------------------

/// A bounded real function over states with value exactly 0 at the
/// terminal state. Houses approximate values V, solved values V*, hitting
/// times H*, and Lyapunov functions L.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValueFunction {
    values: Vec<f64>,
}

impl ValueFunction {
    /// Checks finiteness everywhere and exact zero at `terminal`.
    pub fn new(values: Vec<f64>, terminal: StateId) -> Result<Self, ModelError> {
        if let Some(state) = values.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::ValueNotFinite { state });
        }
        match values.get(terminal.index()) {
            Some(&v) if v != 0.0 => Err(ModelError::ValueNonzeroAtTerminal {
                terminal: terminal.index(),
                value: v,
            }),
            Some(_) => Ok(Self { values }),
            None => Err(ModelError::ValueLength {
                got: values.len(),
                expected: terminal.index() + 1,
            }),
        }
    }

    pub fn zeros(n_states: usize) -> Self {
        Self {
            values: vec![0.0; n_states],
        }
    }

    pub fn value(&self, x: StateId) -> f64 {
        self.values[x.index()]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sup-norm distance to another value function of the same length.
    pub fn sup_distance(&self, other: &ValueFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Verifies that this value function fits `model`: right length,
    /// finite, and zero at the model's terminal state.
    pub fn check_against(&self, model: &KernelSsp) -> Result<(), ModelError> {
        if self.values.len() != model.n_states() {
            return Err(ModelError::ValueLength {
                got: self.values.len(),
                expected: model.n_states(),
            });
        }
        Self::new(self.values.clone(), model.terminal()).map(|_| ())
    }
}

/// A total deterministic mapping from states to admissible actions. The
/// terminal state maps to the stop action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StationaryPolicy {
    choice: Vec<ActionId>,
}

impl StationaryPolicy {
    pub fn new(choice: Vec<ActionId>, model: &KernelSsp) -> Result<Self, ModelError> {
        if choice.len() != model.n_states() {
            return Err(ModelError::PolicyLength {
                got: choice.len(),
                expected: model.n_states(),
            });
        }
        for (x, &u) in choice.iter().enumerate() {
            let available = model.n_actions(StateId(x));
            if u.index() >= available {
                return Err(ModelError::PolicyActionOutOfRange {
                    state: x,
                    action: u.index(),
                    available,
                });
            }
        }
        Ok(Self { choice })
    }

    pub(crate) fn from_choices_unchecked(choice: Vec<ActionId>) -> Self {
        Self { choice }
    }

    pub fn action(&self, x: StateId) -> ActionId {
        self.choice[x.index()]
    }

    pub fn choices(&self) -> &[ActionId] {
        &self.choice
    }
}
