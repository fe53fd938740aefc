//! File formats: models (kernel or disturbance form), scenario specs,
//! value functions, and policies, all as self-describing JSON. Model
//! hashing ties value and policy files to the model they were built
//! against.
//!
//! A kernel-form model file looks like
//!
//! ```json
//! {
//!   "n_states": 3,
//!   "terminal": 2,
//!   "form": "kernel",
//!   "actions": [["go"], ["go"], ["stop"]],
//!   "transitions": [
//!     {"state": 0, "action": 0, "row": [[1, 1.0]], "cost": 1.0},
//!     {"state": 1, "action": 0, "row": [[2, 1.0]], "cost": 1.0},
//!     {"state": 2, "action": 0, "row": [[2, 1.0]], "cost": 0.0}
//!   ]
//! }
//! ```
//!
//! and a disturbance-form file replaces `transitions` with a
//! `disturbances` block (`labels`, `probs`, `nominal`) plus `successors`
//! entries carrying `by_disturbance` successor lists. Every
//! (state, action) pair must appear exactly once. All indices are
//! zero-based; files are UTF-8.
//!
//! Scenario files wrap a spec under a `scenario` key with
//! `kind ∈ {"sharpness", "gridworld", "random"}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::{
    AnySsp, DisturbanceSsp, KernelSsp, ShapeError, SparseRow, StateId, StationaryPolicy,
    ValueFunction,
};
use crate::scenarios::{GridworldSpec, RandomSspSpec, SharpnessSpec};

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ModelFile {
    n_states: usize,
    terminal: usize,
    form: String,
    actions: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    transitions: Option<Vec<TransitionEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    disturbances: Option<DisturbanceBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    successors: Option<Vec<SuccessorEntry>>,
}

#[derive(Serialize, Deserialize)]
struct TransitionEntry {
    state: usize,
    action: usize,
    row: Vec<(usize, f64)>,
    cost: f64,
}

#[derive(Serialize, Deserialize)]
struct DisturbanceBlock {
    labels: Vec<String>,
    probs: Vec<f64>,
    nominal: usize,
}

#[derive(Serialize, Deserialize)]
struct SuccessorEntry {
    state: usize,
    action: usize,
    by_disturbance: Vec<usize>,
    cost: f64,
}

fn kernel_to_file(m: &KernelSsp) -> ModelFile {
    let mut transitions = Vec::new();
    for x in m.states() {
        for u in 0..m.n_actions(x) {
            let u = crate::model::ActionId(u);
            transitions.push(TransitionEntry {
                state: x.index(),
                action: u.index(),
                row: m.row(x, u).iter().map(|&(y, p)| (y.index(), p)).collect(),
                cost: m.cost(x, u),
            });
        }
    }
    ModelFile {
        n_states: m.n_states(),
        terminal: m.terminal().index(),
        form: "kernel".to_string(),
        actions: m.states().map(|x| m.actions(x).to_vec()).collect(),
        transitions: Some(transitions),
        disturbances: None,
        successors: None,
    }
}

fn disturbance_to_file(d: &DisturbanceSsp) -> ModelFile {
    let mut successors = Vec::new();
    for x in d.states() {
        for u in 0..d.n_actions(x) {
            let u = crate::model::ActionId(u);
            successors.push(SuccessorEntry {
                state: x.index(),
                action: u.index(),
                by_disturbance: (0..d.n_disturbances())
                    .map(|w| d.successor(x, u, w).index())
                    .collect(),
                cost: d.cost(x, u),
            });
        }
    }
    ModelFile {
        n_states: d.n_states(),
        terminal: d.terminal().index(),
        form: "disturbance".to_string(),
        actions: d.states().map(|x| d.actions(x).to_vec()).collect(),
        transitions: None,
        disturbances: Some(DisturbanceBlock {
            labels: d.disturbance_labels().to_vec(),
            probs: d.disturbance_probs().to_vec(),
            nominal: d.nominal(),
        }),
        successors: Some(successors),
    }
}

/// Canonical JSON of either model form: entries in (state, action) order,
/// rows sorted by successor. Used for both files and hashing.
pub fn model_to_json(model: &AnySsp) -> String {
    let file = match model {
        AnySsp::Kernel(m) => kernel_to_file(m),
        AnySsp::Disturbance(d) => disturbance_to_file(d),
    };
    serde_json::to_string_pretty(&file).expect("model serialization cannot fail")
}

fn file_to_model(file: ModelFile, path: &str) -> Result<AnySsp, FileError> {
    let per_state_actions: Vec<usize> = file.actions.iter().map(|a| a.len()).collect();
    if per_state_actions.len() != file.n_states {
        return Err(FileError::Format(format!(
            "{path}: actions lists {} states, header says {}",
            per_state_actions.len(),
            file.n_states
        )));
    }
    match file.form.as_str() {
        "kernel" => {
            let entries = file.transitions.ok_or_else(|| {
                FileError::Format(format!("{path}: kernel form requires a transitions table"))
            })?;
            let mut rows: Vec<Vec<Option<SparseRow>>> = per_state_actions
                .iter()
                .map(|&k| vec![None; k])
                .collect();
            let mut costs: Vec<Vec<f64>> =
                per_state_actions.iter().map(|&k| vec![0.0; k]).collect();
            for e in entries {
                let slot = rows
                    .get_mut(e.state)
                    .and_then(|r| r.get_mut(e.action))
                    .ok_or_else(|| {
                        FileError::Format(format!(
                            "{path}: transition entry for unknown (state {}, action {})",
                            e.state, e.action
                        ))
                    })?;
                if slot.is_some() {
                    return Err(FileError::Format(format!(
                        "{path}: duplicate transition entry for (state {}, action {})",
                        e.state, e.action
                    )));
                }
                *slot = Some(e.row.iter().map(|&(y, p)| (StateId(y), p)).collect());
                costs[e.state][e.action] = e.cost;
            }
            let rows: Vec<Vec<SparseRow>> = rows
                .into_iter()
                .enumerate()
                .map(|(x, per_action)| {
                    per_action
                        .into_iter()
                        .enumerate()
                        .map(|(u, row)| {
                            row.ok_or_else(|| {
                                FileError::Format(format!(
                                    "{path}: missing transition entry for (state {x}, action {u})"
                                ))
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let m = KernelSsp::from_parts(
                file.n_states,
                StateId(file.terminal),
                file.actions,
                rows,
                costs,
            )?;
            Ok(AnySsp::Kernel(m))
        }
        "disturbance" => {
            let block = file.disturbances.ok_or_else(|| {
                FileError::Format(format!(
                    "{path}: disturbance form requires a disturbances block"
                ))
            })?;
            let entries = file.successors.ok_or_else(|| {
                FileError::Format(format!("{path}: disturbance form requires a successors table"))
            })?;
            let mut successors: Vec<Vec<Option<Vec<StateId>>>> = per_state_actions
                .iter()
                .map(|&k| vec![None; k])
                .collect();
            let mut costs: Vec<Vec<f64>> =
                per_state_actions.iter().map(|&k| vec![0.0; k]).collect();
            for e in entries {
                let slot = successors
                    .get_mut(e.state)
                    .and_then(|r| r.get_mut(e.action))
                    .ok_or_else(|| {
                        FileError::Format(format!(
                            "{path}: successor entry for unknown (state {}, action {})",
                            e.state, e.action
                        ))
                    })?;
                if slot.is_some() {
                    return Err(FileError::Format(format!(
                        "{path}: duplicate successor entry for (state {}, action {})",
                        e.state, e.action
                    )));
                }
                *slot = Some(e.by_disturbance.iter().map(|&y| StateId(y)).collect());
                costs[e.state][e.action] = e.cost;
            }
            let successors: Vec<Vec<Vec<StateId>>> = successors
                .into_iter()
                .enumerate()
                .map(|(x, per_action)| {
                    per_action
                        .into_iter()
                        .enumerate()
                        .map(|(u, s)| {
                            s.ok_or_else(|| {
                                FileError::Format(format!(
                                    "{path}: missing successor entry for (state {x}, action {u})"
                                ))
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let d = DisturbanceSsp::from_parts(
                file.n_states,
                StateId(file.terminal),
                file.actions,
                costs,
                block.labels,
                block.probs,
                block.nominal,
                successors,
            )?;
            Ok(AnySsp::Disturbance(d))
        }
        other => Err(FileError::Format(format!(
            "{path}: unknown model form {other:?} (expected \"kernel\" or \"disturbance\")"
        ))),
    }
}

pub fn parse_model(text: &str, origin: &str) -> Result<AnySsp, FileError> {
    let file: ModelFile = serde_json::from_str(text).map_err(|source| FileError::Parse {
        path: origin.to_string(),
        source,
    })?;
    file_to_model(file, origin)
}

pub fn load_model(path: &Path) -> Result<AnySsp, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_model(&text, &path.display().to_string())
}

pub fn save_model(model: &AnySsp, path: &Path) -> Result<(), FileError> {
    fs::write(path, model_to_json(model)).map_err(|source| FileError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// SHA-256 of the canonical model JSON, hex-encoded.
pub fn kernel_hash(m: &KernelSsp) -> String {
    hash_str(&model_to_json(&AnySsp::Kernel(m.clone())))
}

pub fn disturbance_hash(d: &DisturbanceSsp) -> String {
    hash_str(&model_to_json(&AnySsp::Disturbance(d.clone())))
}

fn hash_str(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

// ---------------------------------------------------------------------------
// Scenario files
// ---------------------------------------------------------------------------

/// A scenario spec as stored under the `scenario` key of a scenario file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioSpec {
    Sharpness(SharpnessSpec),
    Gridworld(GridworldSpec),
    Random(RandomSspSpec),
}

#[derive(Serialize, Deserialize)]
struct ScenarioFile {
    scenario: ScenarioSpec,
}

pub fn parse_scenario(text: &str, origin: &str) -> Result<ScenarioSpec, FileError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|source| FileError::Parse {
        path: origin.to_string(),
        source,
    })?;
    Ok(file.scenario)
}

pub fn load_scenario(path: &Path) -> Result<ScenarioSpec, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text, &path.display().to_string())
}

pub fn scenario_to_json(spec: &ScenarioSpec) -> String {
    serde_json::to_string_pretty(&ScenarioFile {
        scenario: spec.clone(),
    })
    .expect("scenario serialization cannot fail")
}

// ---------------------------------------------------------------------------
// Value and policy files
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ValueFile {
    values: Vec<f64>,
}

pub fn load_values(path: &Path) -> Result<Vec<f64>, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Read {
        path: path.display().to_string(),
        source,
    })?;
    let file: ValueFile = serde_json::from_str(&text).map_err(|source| FileError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    Ok(file.values)
}

pub fn save_values(values: &ValueFunction, path: &Path) -> Result<(), FileError> {
    let text = serde_json::to_string_pretty(&ValueFile {
        values: values.values().to_vec(),
    })
    .expect("value serialization cannot fail");
    fs::write(path, text).map_err(|source| FileError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// A stored policy: action indices plus the hash of the model it was
/// built against.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolicyFile {
    pub model_hash: String,
    pub actions: Vec<usize>,
}

pub fn load_policy(path: &Path) -> Result<PolicyFile, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Read {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| FileError::Parse {
        path: path.display().to_string(),
        source,
    })
}

pub fn save_policy(
    policy: &StationaryPolicy,
    model_hash: &str,
    path: &Path,
) -> Result<(), FileError> {
    let file = PolicyFile {
        model_hash: model_hash.to_string(),
        actions: policy.choices().iter().map(|a| a.index()).collect(),
    };
    let text = serde_json::to_string_pretty(&file).expect("policy serialization cannot fail");
    fs::write(path, text).map_err(|source| FileError::Write {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{
        gridworld_nav, random_disturbance_ssp, sharpness_chain, Connectivity, Move,
        RandomDisturbanceSpec, SharpnessSpec,
    };

    #[test]
    fn kernel_model_round_trips() {
        let inst = sharpness_chain(&SharpnessSpec { m: 3, eps: 0.1 }).unwrap();
        let json = model_to_json(&AnySsp::Kernel(inst.model.clone()));
        let parsed = parse_model(&json, "test").unwrap();
        match parsed {
            AnySsp::Kernel(m) => assert_eq!(m, inst.model),
            _ => panic!("form changed in round trip"),
        }
    }

    #[test]
    fn disturbance_model_round_trips() {
        let d = random_disturbance_ssp(&RandomDisturbanceSpec {
            n_states: 5,
            n_actions: 2,
            n_disturbances: 3,
            cost_range: (0.1, 1.0),
            seed: 4,
        })
        .unwrap();
        let json = model_to_json(&AnySsp::Disturbance(d.clone()));
        match parse_model(&json, "test").unwrap() {
            AnySsp::Disturbance(parsed) => assert_eq!(parsed, d),
            _ => panic!("form changed in round trip"),
        }
    }

    #[test]
    fn missing_entry_is_a_format_error() {
        let inst = sharpness_chain(&SharpnessSpec { m: 2, eps: 0.1 }).unwrap();
        let mut file = kernel_to_file(&inst.model);
        file.transitions.as_mut().unwrap().pop();
        let json = serde_json::to_string(&file).unwrap();
        assert!(matches!(
            parse_model(&json, "test"),
            Err(FileError::Format(_))
        ));
    }

    #[test]
    fn hash_is_stable_and_form_sensitive() {
        let inst = sharpness_chain(&SharpnessSpec { m: 2, eps: 0.1 }).unwrap();
        assert_eq!(kernel_hash(&inst.model), kernel_hash(&inst.model));
        let other = sharpness_chain(&SharpnessSpec { m: 2, eps: 0.2 }).unwrap();
        assert_ne!(kernel_hash(&inst.model), kernel_hash(&other.model));
    }

    #[test]
    fn scenario_specs_round_trip() {
        let specs = vec![
            ScenarioSpec::Sharpness(SharpnessSpec { m: 4, eps: 0.1 }),
            ScenarioSpec::Gridworld(GridworldSpec {
                width: 3,
                height: 3,
                robot_start: (0, 0),
                target: (2, 2),
                arrival_radius: 0,
                obstacle_start: (1, 1),
                obstacle_moves: vec![(Move::Stay, 0.5), (Move::Up, 0.5)],
                nominal_move: Move::Stay,
                collision_penalty: 2.0,
                connectivity: Connectivity::Four,
            }),
            ScenarioSpec::Random(RandomSspSpec {
                n_states: 6,
                n_actions: 2,
                density: 0.5,
                cost_range: (0.1, 1.0),
                seed: 7,
            }),
        ];
        for spec in specs {
            let json = scenario_to_json(&spec);
            let parsed = parse_scenario(&json, "test").unwrap();
            assert_eq!(scenario_to_json(&parsed), json);
        }
        // Gridworld scenarios build successfully after a round trip.
        if let ScenarioSpec::Gridworld(g) =
            parse_scenario(&scenario_to_json(&ScenarioSpec::Gridworld(GridworldSpec {
                width: 2,
                height: 2,
                robot_start: (0, 0),
                target: (1, 1),
                arrival_radius: 0,
                obstacle_start: (1, 0),
                obstacle_moves: vec![(Move::Stay, 1.0)],
                nominal_move: Move::Stay,
                collision_penalty: 0.0,
                connectivity: Connectivity::Four,
            })), "test")
            .unwrap()
        {
            assert!(gridworld_nav(&g).is_ok());
        } else {
            panic!("kind tag lost");
        }
    }
}
