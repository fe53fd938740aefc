//! A laboratory for finite stochastic-shortest-path (SSP) problems:
//! total-cost control to an absorbing zero-cost terminal state, the
//! rollout and certainty-equivalent policies induced by approximate value
//! functions, and exact, checkable certificates of how suboptimal those
//! policies are.
//!
//! # What it computes
//!
//! For a finite SSP, an approximate value `V`, and the one-step greedy
//! policy `π_R` built from it, the central certified inequality is
//!
//! ```text
//! J^{π_R}(x) - V*(x) ≤ 2 ε E[τ],        ε = ‖V - V*‖∞,
//! ```
//!
//! where `τ` is the closed-loop hitting time of the terminal state: in the
//! undiscounted transient setting, the expected hitting time plays the
//! amplification role that a discount factor or horizon plays elsewhere.
//! The crate computes every quantity in that inequality exactly (dense
//! linear algebra on the closed loop), plus:
//!
//! - the occupation-measure identity
//!   `J^π(x) - V*(x) = Σ_y μ(y)·A*(y, π(y))` and its residual;
//! - certainty-equivalent planning against a nominal disturbance, whose
//!   certified factor widens to `2(ε + δ)` with `δ` the one-step
//!   model-mismatch;
//! - uniform-hitting-bound, Lyapunov-drift, state-dependent-error, and
//!   η-inexact variants of the bound;
//! - the minimum-time specialization `E[τ] ≤ H*(x)/(1 - 2(ε+δ))` for
//!   unit-cost models;
//! - a deterministic chain family on which the hitting-time amplification
//!   is provably unavoidable, for sharpness experiments;
//! - seeded Monte Carlo simulation that cross-checks every exact number.
//!
//! Certificates are conditional on properness (almost-sure absorption) of
//! the certified policy, which is verified structurally; improper closed
//! loops yield a refusal, never a number.
//!
//! # Modules
//!
//! | module | contents |
//! |--------|----------|
//! | [`model`] | model forms, validation, value/policy containers |
//! | [`solver`] | Bellman operator, value iteration, exact evaluation, hitting times, occupation measures |
//! | [`rollout`] | greedy and certainty-equivalent policies, δ and η measures |
//! | [`certificates`] | all performance certificates and their reports |
//! | [`montecarlo`] | seeded reproducible simulation and estimation |
//! | [`scenarios`] | sharpness chain, gridworld navigation, random families |
//! | [`io`] | JSON file formats and model hashing |
//! | [`cli`] | the `ssp-lab` command-line front end |
//!
//! # Quick start
//!
//! ```
//! use ssp_lab::certificates::{rollout_certificate, CertificateOptions};
//! use ssp_lab::model::StateId;
//! use ssp_lab::scenarios::{sharpness_chain, SharpnessSpec};
//!
//! let inst = sharpness_chain(&SharpnessSpec { m: 4, eps: 0.1 }).unwrap();
//! let report = rollout_certificate(
//!     &inst.model,
//!     &inst.surrogate,
//!     StateId(0),
//!     &CertificateOptions::default(),
//! )
//! .unwrap();
//! assert_eq!(report.expected_tau, 5.0);
//! assert!((report.gap - 0.2).abs() < 1e-12);       // = m·eps/2
//! assert!((report.bound_hitting - 1.0).abs() < 1e-12); // = 2·eps·E[τ]
//! assert!(report.all_passed());
//! ```
//!
//! The `examples/` directory has one runnable program per capability; see
//! the README for the list and for the CLI.

pub mod certificates;
pub mod cli;
pub mod io;
pub mod model;
pub mod montecarlo;
pub mod rollout;
pub mod scenarios;
pub mod solver;

pub use certificates::{
    ce_certificate, epsilon_sup, lyapunov_check, local_error_bound, min_time_certificate,
    min_time_certificate_ce, one_step_checks, performance_difference, policy_certificate,
    rollout_certificate, CertificateError, CertificateOptions, CertificateReport, Lyapunov,
    MinTimeOptions, MinTimeReport,
};
pub use model::{
    induce_kernel, unit_cost, ActionId, AnySsp, DisturbanceSsp, KernelSsp, ModelError, StateId,
    StationaryPolicy, ValidationReport, ValueFunction,
};
pub use montecarlo::{estimate, simulate, EstimateReport, ModelRef, SplitMix64, Trajectory};
pub use rollout::{ce_policy, eta_inexactness, greedy_policy, mismatch_delta};
pub use scenarios::{
    frozen_obstacle_value, gridworld_nav, noisy_value, random_disturbance_ssp, random_proper_ssp,
    sharpness_chain, GridworldSpec, RandomDisturbanceSpec, RandomSspSpec, ScenarioError,
    SharpnessSpec,
};
pub use solver::{
    bellman_apply, hitting_time_exact, occupation_measure, policy_evaluation_exact,
    properness_check, solve_optimal, value_iteration, OccupationMeasure, SolveError, SolveResult,
};
