//! Benchmark instance generators: the deterministic sharpness chain, a
//! gridworld navigation task with one stochastically moving obstacle, and
//! seeded random SSP families for property sweeps.
//!
//! All generators are pure functions of their specs; identical specs and
//! seeds produce identical models.

use serde::{Deserialize, Serialize};

use crate::model::{DisturbanceSsp, KernelSsp, SparseRow, StateId, ValueFunction};
use crate::montecarlo::SplitMix64;
use crate::solver::{solve_optimal, SolveError};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("chain length must be at least 1 (got {0})")]
    ChainTooShort(usize),
    #[error("eps must be positive (got {0})")]
    EpsNotPositive(f64),
    #[error("grid must be at least 1x1 (got {width}x{height})")]
    DegenerateGrid { width: usize, height: usize },
    #[error("cell ({x}, {y}) out of bounds for a {width}x{height} grid")]
    CellOutOfBounds {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },
    #[error("obstacle move list is empty")]
    NoObstacleMoves,
    #[error("obstacle move probabilities sum to {0}, expected 1")]
    MoveProbSum(f64),
    #[error("obstacle move probability {prob} for {mv:?} outside [0, 1]")]
    MoveProbOutOfRange { mv: Move, prob: f64 },
    #[error("nominal move {0:?} is not in the obstacle move list")]
    NominalNotInMoves(Move),
    #[error("collision penalty must be nonnegative (got {0})")]
    NegativePenalty(f64),
    #[error("random SSP needs at least 2 states (got {0})")]
    TooFewStates(usize),
    #[error("need at least 1 action per state (got {0})")]
    NoActions(usize),
    #[error("need at least 1 disturbance (got {0})")]
    NoDisturbances(usize),
    #[error("cost range ({0}, {1}) is invalid: need 0 <= lo <= hi")]
    BadCostRange(f64, f64),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Solve(#[from] Box<SolveError>),
}

// ---------------------------------------------------------------------------
// Sharpness chain
// ---------------------------------------------------------------------------

/// Deterministic chain on which hitting-time amplification of the rollout
/// gap is tight up to a constant factor.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SharpnessSpec {
    /// Chain length; states 0..=m plus the terminal state.
    pub m: usize,
    /// Approximation error of the bundled surrogate value.
    pub eps: f64,
}

/// The chain together with its bundled surrogate value and the closed-form
/// quantities it is constructed to realize.
#[derive(Clone, Debug)]
pub struct SharpnessInstance {
    pub model: KernelSsp,
    /// Surrogate value: `-eps` at every chain state, 0 at the terminal.
    pub surrogate: ValueFunction,
    /// Optimal value: identically zero (stopping is free everywhere).
    pub optimal_value: ValueFunction,
    /// `J^{π_R}(0) - V*(0) = m·eps/2`.
    pub expected_gap: f64,
    /// `E[τ] = m + 1` under the rollout policy from state 0.
    pub expected_tau: f64,
}

/// Builds the chain `0, 1, …, m, t`. States `i < m` offer a free stop
/// action to `t` (index 0) and a continue action to `i+1` at cost `eps/2`
/// (index 1); state `m` can only stop. The surrogate value `-eps` on chain
/// states makes the greedy score of continuing `-eps/2 < 0`, so the
/// one-step greedy policy walks the whole chain before stopping.
pub fn sharpness_chain(spec: &SharpnessSpec) -> Result<SharpnessInstance, ScenarioError> {
    if spec.m < 1 {
        return Err(ScenarioError::ChainTooShort(spec.m));
    }
    if spec.eps <= 0.0 || spec.eps.is_nan() {
        return Err(ScenarioError::EpsNotPositive(spec.eps));
    }
    let m = spec.m;
    let n = m + 2;
    let terminal = StateId(m + 1);
    let mut actions = Vec::with_capacity(n);
    let mut rows: Vec<Vec<SparseRow>> = Vec::with_capacity(n);
    let mut costs = Vec::with_capacity(n);
    for i in 0..m {
        actions.push(vec!["stop".to_string(), "continue".to_string()]);
        rows.push(vec![vec![(terminal, 1.0)], vec![(StateId(i + 1), 1.0)]]);
        costs.push(vec![0.0, spec.eps / 2.0]);
    }
    actions.push(vec!["stop".to_string()]);
    rows.push(vec![vec![(terminal, 1.0)]]);
    costs.push(vec![0.0]);
    actions.push(vec!["stop".to_string()]);
    rows.push(vec![vec![(terminal, 1.0)]]);
    costs.push(vec![0.0]);
    let model = KernelSsp::from_parts(n, terminal, actions, rows, costs)
        .expect("chain shape is consistent")
        .validated()?;
    let mut surrogate = vec![-spec.eps; n];
    surrogate[terminal.index()] = 0.0;
    Ok(SharpnessInstance {
        surrogate: ValueFunction::new(surrogate, terminal)?,
        optimal_value: ValueFunction::zeros(n),
        expected_gap: m as f64 * spec.eps / 2.0,
        expected_tau: (m + 1) as f64,
        model,
    })
}

// ---------------------------------------------------------------------------
// Gridworld navigation
// ---------------------------------------------------------------------------

/// A single grid move. Moves that would leave the grid clamp each
/// coordinate independently, so a blocked cardinal move becomes a stay.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Move {
    Stay,
    Up,
    Down,
    Left,
    Right,
    UpLeft,
    UpRight,
    DownLeft,
    DownRight,
}

impl Move {
    pub fn delta(self) -> (isize, isize) {
        match self {
            Move::Stay => (0, 0),
            Move::Up => (0, -1),
            Move::Down => (0, 1),
            Move::Left => (-1, 0),
            Move::Right => (1, 0),
            Move::UpLeft => (-1, -1),
            Move::UpRight => (1, -1),
            Move::DownLeft => (-1, 1),
            Move::DownRight => (1, 1),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Move::Stay => "stay",
            Move::Up => "up",
            Move::Down => "down",
            Move::Left => "left",
            Move::Right => "right",
            Move::UpLeft => "up_left",
            Move::UpRight => "up_right",
            Move::DownLeft => "down_left",
            Move::DownRight => "down_right",
        }
    }
}

/// Robot move set: stay plus the 4- or 8-connected neighborhood.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    pub fn moves(self) -> &'static [Move] {
        match self {
            Connectivity::Four => &[Move::Stay, Move::Up, Move::Down, Move::Left, Move::Right],
            Connectivity::Eight => &[
                Move::Stay,
                Move::Up,
                Move::Down,
                Move::Left,
                Move::Right,
                Move::UpLeft,
                Move::UpRight,
                Move::DownLeft,
                Move::DownRight,
            ],
        }
    }
}

/// Robot navigation among one moving obstacle on a `width x height` grid.
///
/// The joint state is (robot cell, obstacle cell) plus the terminal state.
/// Each step the robot applies its chosen move and the obstacle applies a
/// move sampled from `obstacle_moves`; arrival is checked after the robot
/// move (Manhattan distance to `target` at most `arrival_radius`), in
/// which case the successor is the terminal state regardless of the
/// obstacle. Stage cost is 1 per nonterminal step plus `collision_penalty`
/// when robot and obstacle share a cell.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridworldSpec {
    pub width: usize,
    pub height: usize,
    pub robot_start: (usize, usize),
    pub target: (usize, usize),
    pub arrival_radius: usize,
    pub obstacle_start: (usize, usize),
    pub obstacle_moves: Vec<(Move, f64)>,
    /// Nominal obstacle move used by certainty-equivalent planning; must
    /// be a member of `obstacle_moves`.
    pub nominal_move: Move,
    pub collision_penalty: f64,
    pub connectivity: Connectivity,
}

impl GridworldSpec {
    fn check(&self) -> Result<(), ScenarioError> {
        if self.width == 0 || self.height == 0 {
            return Err(ScenarioError::DegenerateGrid {
                width: self.width,
                height: self.height,
            });
        }
        for &(x, y) in [&self.robot_start, &self.target, &self.obstacle_start] {
            if x >= self.width || y >= self.height {
                return Err(ScenarioError::CellOutOfBounds {
                    x,
                    y,
                    width: self.width,
                    height: self.height,
                });
            }
        }
        if self.obstacle_moves.is_empty() {
            return Err(ScenarioError::NoObstacleMoves);
        }
        let mut sum = 0.0;
        for &(mv, p) in &self.obstacle_moves {
            if !(0.0..=1.0 + 1e-9).contains(&p) {
                return Err(ScenarioError::MoveProbOutOfRange { mv, prob: p });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ScenarioError::MoveProbSum(sum));
        }
        if !self.obstacle_moves.iter().any(|&(m, _)| m == self.nominal_move) {
            return Err(ScenarioError::NominalNotInMoves(self.nominal_move));
        }
        if self.collision_penalty < 0.0 || self.collision_penalty.is_nan() {
            return Err(ScenarioError::NegativePenalty(self.collision_penalty));
        }
        Ok(())
    }

    pub fn n_cells(&self) -> usize {
        self.width * self.height
    }

    pub fn cell(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    /// Joint state id of (robot cell, obstacle cell).
    pub fn joint_state(&self, robot: (usize, usize), obstacle: (usize, usize)) -> StateId {
        let n = self.n_cells();
        StateId(self.cell(robot.0, robot.1) * n + self.cell(obstacle.0, obstacle.1))
    }

    /// Conventional start state: robot and obstacle at their start cells.
    pub fn start_state(&self) -> StateId {
        self.joint_state(self.robot_start, self.obstacle_start)
    }

    pub fn terminal_state(&self) -> StateId {
        StateId(self.n_cells() * self.n_cells())
    }

    fn clamp_move(&self, (x, y): (usize, usize), mv: Move) -> (usize, usize) {
        let (dx, dy) = mv.delta();
        let cx = (x as isize + dx).clamp(0, self.width as isize - 1) as usize;
        let cy = (y as isize + dy).clamp(0, self.height as isize - 1) as usize;
        (cx, cy)
    }

    fn arrived(&self, (x, y): (usize, usize)) -> bool {
        let dist = x.abs_diff(self.target.0) + y.abs_diff(self.target.1);
        dist <= self.arrival_radius
    }
}

/// Builds the joint-state disturbance-form model of a gridworld spec. The
/// disturbance list is the obstacle move list; unreachable targets are not
/// detected here (properness surfaces when a policy is checked).
pub fn gridworld_nav(spec: &GridworldSpec) -> Result<DisturbanceSsp, ScenarioError> {
    spec.check()?;
    let n_cells = spec.n_cells();
    let n_states = n_cells * n_cells + 1;
    let terminal = spec.terminal_state();
    let robot_moves = spec.connectivity.moves();
    let action_labels: Vec<String> = robot_moves.iter().map(|m| m.label().to_string()).collect();
    let disturbance_labels: Vec<String> = spec
        .obstacle_moves
        .iter()
        .map(|&(m, _)| m.label().to_string())
        .collect();
    let disturbance_probs: Vec<f64> = spec.obstacle_moves.iter().map(|&(_, p)| p).collect();
    let nominal = spec
        .obstacle_moves
        .iter()
        .position(|&(m, _)| m == spec.nominal_move)
        .expect("checked above");

    let mut actions = Vec::with_capacity(n_states);
    let mut costs = Vec::with_capacity(n_states);
    let mut successors = Vec::with_capacity(n_states);
    for robot_cell in 0..n_cells {
        let robot = (robot_cell % spec.width, robot_cell / spec.width);
        for obstacle_cell in 0..n_cells {
            let obstacle = (obstacle_cell % spec.width, obstacle_cell / spec.width);
            let step_cost = if robot_cell == obstacle_cell {
                1.0 + spec.collision_penalty
            } else {
                1.0
            };
            let mut per_action = Vec::with_capacity(robot_moves.len());
            for &mv in robot_moves {
                let next_robot = spec.clamp_move(robot, mv);
                let by_disturbance: Vec<StateId> = if spec.arrived(next_robot) {
                    vec![terminal; spec.obstacle_moves.len()]
                } else {
                    spec.obstacle_moves
                        .iter()
                        .map(|&(omv, _)| spec.joint_state(next_robot, spec.clamp_move(obstacle, omv)))
                        .collect()
                };
                per_action.push(by_disturbance);
            }
            actions.push(action_labels.clone());
            costs.push(vec![step_cost; robot_moves.len()]);
            successors.push(per_action);
        }
    }
    actions.push(vec!["stop".to_string()]);
    costs.push(vec![0.0]);
    successors.push(vec![vec![terminal; spec.obstacle_moves.len()]]);

    let d = DisturbanceSsp::from_parts(
        n_states,
        terminal,
        actions,
        costs,
        disturbance_labels,
        disturbance_probs,
        nominal,
        successors,
    )
    .expect("gridworld shape is consistent")
    .validated()?;
    Ok(d)
}

/// Frozen-obstacle surrogate for certainty-equivalent experiments: solves
/// the same spec with the obstacle motion replaced by "always stay", which
/// yields an exact value for every joint state (i.e. for every possible
/// frozen obstacle position) on the shared state indexing.
pub fn frozen_obstacle_value(spec: &GridworldSpec) -> Result<ValueFunction, ScenarioError> {
    let mut frozen = spec.clone();
    frozen.obstacle_moves = vec![(Move::Stay, 1.0)];
    frozen.nominal_move = Move::Stay;
    let kernel = crate::model::induce_kernel(&gridworld_nav(&frozen)?)?;
    let solved = solve_optimal(&kernel).map_err(Box::new)?;
    Ok(solved.value)
}

// ---------------------------------------------------------------------------
// Random instance families
// ---------------------------------------------------------------------------

/// Seeded random kernel-form SSP in which a proper policy always exists:
/// action 0 of every nonterminal state carries direct terminal mass of at
/// least 0.05.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RandomSspSpec {
    pub n_states: usize,
    pub n_actions: usize,
    /// Fraction of the state space used as successor support per row.
    pub density: f64,
    pub cost_range: (f64, f64),
    pub seed: u64,
}

pub fn random_proper_ssp(spec: &RandomSspSpec) -> Result<KernelSsp, ScenarioError> {
    if spec.n_states < 2 {
        return Err(ScenarioError::TooFewStates(spec.n_states));
    }
    if spec.n_actions < 1 {
        return Err(ScenarioError::NoActions(spec.n_actions));
    }
    let (lo, hi) = spec.cost_range;
    if lo < 0.0 || hi < lo || lo.is_nan() || hi.is_nan() {
        return Err(ScenarioError::BadCostRange(lo, hi));
    }
    let n = spec.n_states;
    let terminal = StateId(n - 1);
    let mut rng = SplitMix64::new(spec.seed);
    let support = ((spec.density * n as f64).round() as usize).clamp(1, n);

    let mut actions = Vec::with_capacity(n);
    let mut rows: Vec<Vec<SparseRow>> = Vec::with_capacity(n);
    let mut costs = Vec::with_capacity(n);
    for x in 0..n - 1 {
        let _ = x;
        let labels: Vec<String> = (0..spec.n_actions).map(|a| format!("a{a}")).collect();
        let mut per_action = Vec::with_capacity(spec.n_actions);
        let mut per_cost = Vec::with_capacity(spec.n_actions);
        for a in 0..spec.n_actions {
            let mut row = random_row(&mut rng, n, support);
            if a == 0 {
                // Guarantee an escape route: blend in direct terminal mass.
                for entry in &mut row {
                    entry.1 *= 0.95;
                }
                match row.iter_mut().find(|(y, _)| *y == terminal) {
                    Some(entry) => entry.1 += 0.05,
                    None => row.push((terminal, 0.05)),
                }
                row.sort_by_key(|&(y, _)| y);
            }
            per_action.push(row);
            per_cost.push(lo + rng.next_f64() * (hi - lo));
        }
        actions.push(labels);
        rows.push(per_action);
        costs.push(per_cost);
    }
    actions.push(vec!["stop".to_string()]);
    rows.push(vec![vec![(terminal, 1.0)]]);
    costs.push(vec![0.0]);
    Ok(KernelSsp::from_parts(n, terminal, actions, rows, costs)
        .expect("generated shape is consistent")
        .validated()?)
}

fn random_row(rng: &mut SplitMix64, n_states: usize, support: usize) -> SparseRow {
    // Partial Fisher-Yates over the state indices.
    let mut candidates: Vec<usize> = (0..n_states).collect();
    let mut row: SparseRow = Vec::with_capacity(support);
    let mut total = 0.0;
    for i in 0..support {
        let j = i + (rng.next_u64() as usize) % (n_states - i);
        candidates.swap(i, j);
        let weight = 0.05 + rng.next_f64();
        total += weight;
        row.push((StateId(candidates[i]), weight));
    }
    for entry in &mut row {
        entry.1 /= total;
    }
    row.sort_by_key(|&(y, _)| y);
    row
}

/// Seeded random disturbance-form SSP; action 0 of every nonterminal state
/// maps every disturbance to the terminal state, so a proper policy exists.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RandomDisturbanceSpec {
    pub n_states: usize,
    pub n_actions: usize,
    pub n_disturbances: usize,
    pub cost_range: (f64, f64),
    pub seed: u64,
}

pub fn random_disturbance_ssp(
    spec: &RandomDisturbanceSpec,
) -> Result<DisturbanceSsp, ScenarioError> {
    if spec.n_states < 2 {
        return Err(ScenarioError::TooFewStates(spec.n_states));
    }
    if spec.n_actions < 1 {
        return Err(ScenarioError::NoActions(spec.n_actions));
    }
    if spec.n_disturbances < 1 {
        return Err(ScenarioError::NoDisturbances(spec.n_disturbances));
    }
    let (lo, hi) = spec.cost_range;
    if lo < 0.0 || hi < lo || lo.is_nan() || hi.is_nan() {
        return Err(ScenarioError::BadCostRange(lo, hi));
    }
    let n = spec.n_states;
    let terminal = StateId(n - 1);
    let mut rng = SplitMix64::new(spec.seed);

    let mut probs: Vec<f64> = (0..spec.n_disturbances)
        .map(|_| 0.05 + rng.next_f64())
        .collect();
    let total: f64 = probs.iter().sum();
    for q in &mut probs {
        *q /= total;
    }
    let labels: Vec<String> = (0..spec.n_disturbances).map(|w| format!("w{w}")).collect();

    let mut actions = Vec::with_capacity(n);
    let mut costs = Vec::with_capacity(n);
    let mut successors = Vec::with_capacity(n);
    for _ in 0..n - 1 {
        let mut per_action = Vec::with_capacity(spec.n_actions);
        let mut per_cost = Vec::with_capacity(spec.n_actions);
        for a in 0..spec.n_actions {
            let by_disturbance: Vec<StateId> = (0..spec.n_disturbances)
                .map(|_| {
                    if a == 0 {
                        terminal
                    } else {
                        StateId((rng.next_u64() as usize) % n)
                    }
                })
                .collect();
            per_action.push(by_disturbance);
            per_cost.push(lo + rng.next_f64() * (hi - lo));
        }
        actions.push((0..spec.n_actions).map(|a| format!("a{a}")).collect());
        costs.push(per_cost);
        successors.push(per_action);
    }
    actions.push(vec!["stop".to_string()]);
    costs.push(vec![0.0]);
    successors.push(vec![vec![terminal; spec.n_disturbances]]);
    Ok(DisturbanceSsp::from_parts(
        n,
        terminal,
        actions,
        costs,
        labels,
        probs,
        0,
        successors,
    )
    .expect("generated shape is consistent")
    .validated()?)
}

/// Perturbs a solved value with per-state uniform noise in
/// `[-amplitude, amplitude]`, keeping the terminal value pinned at zero.
pub fn noisy_value(
    vstar: &ValueFunction,
    amplitude: f64,
    seed: u64,
    terminal: StateId,
) -> ValueFunction {
    let mut rng = SplitMix64::new(seed);
    let values: Vec<f64> = vstar
        .values()
        .iter()
        .enumerate()
        .map(|(x, &v)| {
            let noise = (2.0 * rng.next_f64() - 1.0) * amplitude;
            if x == terminal.index() {
                0.0
            } else {
                v + noise
            }
        })
        .collect();
    ValueFunction::new(values, terminal).expect("noise preserves finiteness and terminal zero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{induce_kernel, ActionId};
    use crate::solver::{solve_optimal, value_iteration};

    fn basic_gridworld() -> GridworldSpec {
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

    #[test]
    fn sharpness_chain_realizes_its_closed_forms() {
        for &(m, eps) in &[(1usize, 0.1), (4, 0.1), (10, 0.01)] {
            let inst = sharpness_chain(&SharpnessSpec { m, eps }).unwrap();
            assert!(inst.model.validate().is_valid());
            let solved = solve_optimal(&inst.model).unwrap();
            assert_eq!(solved.value, inst.optimal_value);
            assert_eq!(
                inst.surrogate.sup_distance(&solved.value),
                eps,
                "sup distance should be exactly eps"
            );
        }
    }

    #[test]
    fn sharpness_chain_rejects_bad_specs() {
        assert!(sharpness_chain(&SharpnessSpec { m: 0, eps: 0.1 }).is_err());
        assert!(sharpness_chain(&SharpnessSpec { m: 3, eps: 0.0 }).is_err());
    }

    /// Breadth-first distance to the arrival region on the "move, then
    /// check arrival" graph, independent of the solver stack.
    #[allow(clippy::needless_range_loop)]
    fn bfs_arrival_distance(spec: &GridworldSpec) -> Vec<usize> {
        let n = spec.n_cells();
        let moves = spec.connectivity.moves();
        // dist[cell] = optimal number of moves from cell.
        let mut dist = vec![usize::MAX; n];
        // Seed: cells from which one move lands in the arrival region.
        let mut queue = std::collections::VecDeque::new();
        for cell in 0..n {
            let pos = (cell % spec.width, cell / spec.width);
            if moves.iter().any(|&m| spec.arrived(spec.clamp_move(pos, m))) {
                dist[cell] = 1;
                queue.push_back(cell);
            }
        }
        while let Some(cell) = queue.pop_front() {
            let pos = (cell % spec.width, cell / spec.width);
            for cand in 0..n {
                let cpos = (cand % spec.width, cand / spec.width);
                let reaches = moves.iter().any(|&m| {
                    !spec.arrived(spec.clamp_move(cpos, m))
                        && spec.clamp_move(cpos, m) == pos
                });
                if reaches && dist[cand] > dist[cell] + 1 {
                    dist[cand] = dist[cell] + 1;
                    queue.push_back(cand);
                }
            }
        }
        dist
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn stationary_obstacle_reduces_to_shortest_path() {
        let mut spec = basic_gridworld();
        spec.collision_penalty = 0.0;
        spec.obstacle_moves = vec![(Move::Stay, 1.0)];
        let d = gridworld_nav(&spec).unwrap();
        let kernel = induce_kernel(&d).unwrap();
        let solved = solve_optimal(&kernel).unwrap();
        let bfs = bfs_arrival_distance(&spec);
        for robot in 0..spec.n_cells() {
            for obstacle in 0..spec.n_cells() {
                let joint = robot * spec.n_cells() + obstacle;
                assert!(
                    (solved.value.values()[joint] - bfs[robot] as f64).abs() < 1e-9,
                    "robot cell {robot}, obstacle cell {obstacle}"
                );
            }
        }
    }

    #[test]
    fn corridor_hitting_time_is_its_length() {
        let spec = GridworldSpec {
            width: 5,
            height: 1,
            robot_start: (0, 0),
            target: (4, 0),
            arrival_radius: 0,
            obstacle_start: (2, 0),
            obstacle_moves: vec![(Move::Stay, 1.0)],
            nominal_move: Move::Stay,
            collision_penalty: 0.0,
            connectivity: Connectivity::Four,
        };
        let kernel = induce_kernel(&gridworld_nav(&spec).unwrap()).unwrap();
        let solved = solve_optimal(&kernel).unwrap();
        assert_eq!(solved.value.values()[spec.start_state().index()], 4.0);
    }

    #[test]
    fn moving_obstacle_model_is_well_formed() {
        let d = gridworld_nav(&basic_gridworld()).unwrap();
        assert!(d.validate().is_valid());
        let kernel = induce_kernel(&d).unwrap();
        assert!(kernel.validate().is_valid());
        assert!(solve_optimal(&kernel).is_ok());
    }

    #[test]
    fn frozen_obstacle_value_covers_every_joint_state() {
        let spec = basic_gridworld();
        let v = frozen_obstacle_value(&spec).unwrap();
        let d = gridworld_nav(&spec).unwrap();
        assert_eq!(v.len(), d.n_states());
        assert_eq!(v.value(d.terminal()), 0.0);
    }

    #[test]
    fn random_ssp_is_deterministic_and_solvable() {
        for seed in 0..1000u64 {
            let spec = RandomSspSpec {
                n_states: 6,
                n_actions: 3,
                density: 0.5,
                cost_range: (0.1, 2.0),
                seed,
            };
            let m = random_proper_ssp(&spec).unwrap();
            assert!(m.validate().is_valid());
            assert!(value_iteration(&m, 1e-10, 1_000_000).is_ok(), "seed {seed}");
            assert_eq!(m, random_proper_ssp(&spec).unwrap());
        }
    }

    #[test]
    fn minimal_random_ssp_reaches_terminal() {
        let m = random_proper_ssp(&RandomSspSpec {
            n_states: 2,
            n_actions: 1,
            density: 1.0,
            cost_range: (1.0, 1.0),
            seed: 0,
        })
        .unwrap();
        let mass: f64 = m
            .row(StateId(0), ActionId(0))
            .iter()
            .filter(|&&(y, _)| y == m.terminal())
            .map(|&(_, p)| p)
            .sum();
        assert!(mass >= 0.05);
    }

    #[test]
    fn random_disturbance_ssp_is_valid_and_deterministic() {
        let spec = RandomDisturbanceSpec {
            n_states: 7,
            n_actions: 3,
            n_disturbances: 4,
            cost_range: (0.1, 1.0),
            seed: 42,
        };
        let d = random_disturbance_ssp(&spec).unwrap();
        assert!(d.validate().is_valid());
        assert_eq!(d, random_disturbance_ssp(&spec).unwrap());
        assert!(solve_optimal(&induce_kernel(&d).unwrap()).is_ok());
    }

    #[test]
    fn noisy_value_stays_within_amplitude_and_pins_terminal() {
        let inst = sharpness_chain(&SharpnessSpec { m: 5, eps: 0.3 }).unwrap();
        let noisy = noisy_value(&inst.optimal_value, 0.1, 9, inst.model.terminal());
        assert_eq!(noisy.value(inst.model.terminal()), 0.0);
        for (a, b) in noisy.values().iter().zip(inst.optimal_value.values()) {
            assert!((a - b).abs() <= 0.1);
        }
    }
}
