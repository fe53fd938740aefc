//! Command-line front end: `validate`, `certify`, `sweep`, and `simulate`
//! subcommands over the library, with machine-readable output.
//!
//! Exit codes: 0 success; 1 validation failure; 2 I/O or parse error;
//! 3 properness refusal (certificate declined); 4 certified-bound
//! violation. Exit 4 on a valid instance would falsify the implementation
//! rather than the theory, so CI treats it as a test failure.
//!
//! Table output is comma-separated with a header row and fixed
//! 12-significant-digit numbers, for diff-stable artifacts. The
//! `SSP_LAB_TOL` environment variable overrides the default solver
//! tolerance.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::certificates::{
    ce_certificate, min_time_certificate, min_time_certificate_ce, rollout_certificate,
    CertificateError, CertificateOptions, CertificateReport, Lyapunov, MinTimeOptions,
    MinTimeReport, CERT_VI_MAX_ITERS, CERT_VI_TOL,
};
use crate::io::{self, ScenarioSpec};
use crate::model::{AnySsp, DisturbanceSsp, KernelSsp, StateId, StationaryPolicy, ValueFunction};
use crate::montecarlo::{estimate, ModelRef, DEFAULT_MAX_STEPS};
use crate::rollout::greedy_policy;
use crate::scenarios::{
    frozen_obstacle_value, gridworld_nav, noisy_value, random_proper_ssp, sharpness_chain,
    RandomSspSpec, SharpnessSpec,
};
use crate::solver::{hitting_time_exact, policy_evaluation_exact, solve_optimal};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;
pub const EXIT_BOUND_VIOLATION: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "ssp-lab",
    about = "Finite SSP laboratory: exact solves, rollout policies, and performance certificates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a model file against every structural and semantic invariant.
    Validate {
        /// Model file (kernel or disturbance form).
        model: PathBuf,
    },
    /// Solve a model, build the rollout (or CE) policy from a value
    /// source, and certify its suboptimality.
    Certify(CertifyArgs),
    /// Certify a family of instances and print one table row per instance.
    Sweep(SweepArgs),
    /// Simulate a policy and report empirical cost and hitting time.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub value: ValueArgs,
    /// Start state index (defaults to the scenario's start, or 0).
    #[arg(long)]
    pub from: Option<usize>,
    /// Certify the certainty-equivalent policy (disturbance-form input).
    #[arg(long)]
    pub ce: bool,
    /// Uniform hitting bound N for the 2(eps+delta)N variant.
    #[arg(long = "N")]
    pub uniform_n: Option<f64>,
    /// Value file holding a candidate Lyapunov function L.
    #[arg(long)]
    pub lyapunov: Option<PathBuf>,
    /// Drift constant c accompanying --lyapunov.
    #[arg(long)]
    pub c: Option<f64>,
    /// Check the drift uniformly over all admissible actions.
    #[arg(long)]
    pub uniform_drift: bool,
    /// Also compute the occupation-weighted state-dependent error bound.
    #[arg(long)]
    pub local_eps: bool,
    /// Restrict eps to the closed loop's reachable closure.
    #[arg(long)]
    pub reachable_eps: bool,
    /// Emit the minimum-time certificate (unit-cost rewrite) instead of
    /// the cost-gap certificate.
    #[arg(long)]
    pub min_time: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Output format.
    #[arg(long, default_value = "report")]
    pub format: OutputFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    /// Pretty JSON document.
    Report,
    /// One CSV row (plus header).
    Table,
}

/// Where the model comes from: a file or a built-in scenario.
#[derive(Args, Debug)]
pub struct InstanceArgs {
    /// Model file (kernel or disturbance form).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Scenario file ({"scenario": {"kind": ...}}).
    #[arg(long)]
    pub scenario_file: Option<PathBuf>,
    /// Built-in scenario: sharpness | gridworld | random.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Sharpness chain length.
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// Sharpness surrogate error.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Random-scenario state count.
    #[arg(long)]
    pub n_states: Option<usize>,
    /// Random-scenario action count.
    #[arg(long)]
    pub n_actions: Option<usize>,
    /// Random-scenario row density.
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    /// Random-scenario cost range, as lo,hi.
    #[arg(long, value_parser = parse_pair_f64, default_value = "0.1,2.0")]
    pub cost_range: (f64, f64),
    /// Random-scenario model seed.
    #[arg(long, default_value_t = 0)]
    pub model_seed: u64,
}

/// Where the approximate value function comes from.
#[derive(Args, Debug)]
pub struct ValueArgs {
    /// Value file ({"values": [...]}).
    #[arg(long)]
    pub value: Option<PathBuf>,
    /// Solve the model and add this constant to every nonterminal value.
    #[arg(long, allow_negative_numbers = true)]
    pub value_offset: Option<f64>,
    /// Solve the model and add per-state uniform noise of this amplitude.
    #[arg(long)]
    pub value_noise: Option<f64>,
    /// Seed for --value-noise.
    #[arg(long, default_value_t = 0)]
    pub value_seed: u64,
    /// Gridworld only: use the frozen-obstacle surrogate value.
    #[arg(long)]
    pub surrogate_frozen: bool,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Built-in scenario family: sharpness | random.
    #[arg(long, conflicts_with = "random")]
    pub scenario: Option<String>,
    /// Shorthand for --scenario random.
    #[arg(long)]
    pub random: bool,
    /// Sharpness chain lengths, comma-separated.
    #[arg(long = "M-list", value_delimiter = ',')]
    pub m_list: Vec<usize>,
    /// Sharpness surrogate errors, comma-separated.
    #[arg(long = "eps-list", value_delimiter = ',')]
    pub eps_list: Vec<f64>,
    /// Random-family seeds, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    /// Random-family state count.
    #[arg(long, default_value_t = 12)]
    pub n_states: usize,
    /// Random-family action count.
    #[arg(long, default_value_t = 3)]
    pub n_actions: usize,
    /// Random-family row density.
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    /// Random-family cost range, as lo,hi.
    #[arg(long, value_parser = parse_pair_f64, default_value = "0.1,2.0")]
    pub cost_range: (f64, f64),
    /// Noise amplitude for the random-family surrogate values.
    #[arg(long, default_value_t = 0.1)]
    pub eps0: f64,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub value: ValueArgs,
    /// Policy file to simulate (default: rollout policy from the value
    /// source, or the optimal policy when no value source is given).
    #[arg(long)]
    pub policy: Option<PathBuf>,
    /// Start state index.
    #[arg(long)]
    pub from: Option<usize>,
    /// Number of replications.
    #[arg(long, default_value_t = 100_000)]
    pub reps: usize,
    /// Base seed; replication r runs on the stream derived from (seed, r).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-trajectory step cap.
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
    /// Also solve exactly and require the 99% confidence interval to
    /// cover the exact cost and hitting time.
    #[arg(long)]
    pub cross_check: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_pair_f64(text: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err("expected lo,hi".to_string());
    }
    let lo = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let hi = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

/// Formats with 12 significant digits, the fixed table precision.
pub fn fmt_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

/// Parses `std::env::args` and runs; returns the process exit code.
pub fn run_from_env() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own message (help/version are successes).
            let _ = e.print();
            return if e.use_stderr() { EXIT_IO } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    execute(cli, &mut out)
}

/// Runs a parsed command, writing human/machine output to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Validate { model } => cmd_validate(&model, out),
        Command::Certify(args) => cmd_certify(&args, out),
        Command::Sweep(args) => cmd_sweep(&args, out),
        Command::Simulate(args) => cmd_simulate(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(out, "error: {}", failure.message);
            failure.code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<io::FileError> for Failure {
    fn from(e: io::FileError) -> Self {
        match e {
            io::FileError::Shape(shape) => Failure::new(EXIT_INVALID, shape.to_string()),
            other => Failure::new(EXIT_IO, other.to_string()),
        }
    }
}

impl From<CertificateError> for Failure {
    fn from(e: CertificateError) -> Self {
        let code = match &e {
            CertificateError::ImproperRollout { .. }
            | CertificateError::ImproperCe { .. }
            | CertificateError::ImproperPolicy { .. } => EXIT_REFUSED,
            CertificateError::DriftViolated { .. }
            | CertificateError::LyapunovNegative { .. }
            | CertificateError::DriftConstantNotPositive(_)
            | CertificateError::FactorTooLarge { .. }
            | CertificateError::Model(_) => EXIT_INVALID,
            CertificateError::Solve(_) => EXIT_INVALID,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<crate::scenarios::ScenarioError> for Failure {
    fn from(e: crate::scenarios::ScenarioError) -> Self {
        Failure::new(EXIT_INVALID, e.to_string())
    }
}

impl From<crate::model::ModelError> for Failure {
    fn from(e: crate::model::ModelError) -> Self {
        Failure::new(EXIT_INVALID, e.to_string())
    }
}

impl From<crate::solver::SolveError> for Failure {
    fn from(e: crate::solver::SolveError) -> Self {
        Failure::new(EXIT_INVALID, e.to_string())
    }
}

fn solver_tol() -> f64 {
    std::env::var("SSP_LAB_TOL")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(CERT_VI_TOL)
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

fn cmd_validate(path: &std::path::Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let model = io::load_model(path)?;
    let report = model.validate();
    if report.is_valid() {
        let _ = writeln!(out, "valid: {} states", model.n_states());
        Ok(EXIT_OK)
    } else {
        for violation in &report.violations {
            let _ = writeln!(out, "violation: {violation}");
        }
        Ok(EXIT_INVALID)
    }
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

/// A fully resolved instance: the model (both views where available), a
/// value function, and a default start state.
struct Instance {
    kernel: KernelSsp,
    disturbance: Option<DisturbanceSsp>,
    value: ValueFunction,
    default_start: StateId,
}

fn resolve_instance(args: &InstanceArgs, value: &ValueArgs) -> Result<Instance, Failure> {
    let (model, default_start, builtin_value) = resolve_model(args)?;
    let (kernel, disturbance) = match model {
        AnySsp::Kernel(k) => (k.clone().validated()?, None),
        AnySsp::Disturbance(d) => {
            let d = d.clone().validated()?;
            (crate::model::induce_kernel(&d)?, Some(d))
        }
    };
    let value = resolve_value(value, &kernel, disturbance.as_ref(), args, builtin_value)?;
    Ok(Instance {
        kernel,
        disturbance,
        value,
        default_start,
    })
}

/// Returns the model, its conventional start state, and a scenario-bundled
/// value function if the scenario defines one.
fn resolve_model(
    args: &InstanceArgs,
) -> Result<(AnySsp, StateId, Option<ValueFunction>), Failure> {
    if let Some(path) = &args.model {
        let model = io::load_model(path)?;
        let report = model.validate();
        if !report.is_valid() {
            return Err(Failure::new(
                EXIT_INVALID,
                format!("model failed validation:\n{report}"),
            ));
        }
        return Ok((model, StateId(0), None));
    }
    let spec = if let Some(path) = &args.scenario_file {
        io::load_scenario(path)?
    } else if let Some(kind) = &args.scenario {
        match kind.as_str() {
            "sharpness" => ScenarioSpec::Sharpness(SharpnessSpec {
                m: args.m.ok_or_else(|| missing("--M"))?,
                eps: args.eps.ok_or_else(|| missing("--eps"))?,
            }),
            "random" => ScenarioSpec::Random(RandomSspSpec {
                n_states: args.n_states.ok_or_else(|| missing("--n-states"))?,
                n_actions: args.n_actions.unwrap_or(2),
                density: args.density,
                cost_range: args.cost_range,
                seed: args.model_seed,
            }),
            "gridworld" => {
                return Err(Failure::new(
                    EXIT_IO,
                    "gridworld scenarios are specified by file: --scenario-file <path>",
                ))
            }
            other => {
                return Err(Failure::new(
                    EXIT_IO,
                    format!("unknown scenario kind {other:?}"),
                ))
            }
        }
    } else {
        return Err(missing("--model, --scenario-file, or --scenario"));
    };
    build_scenario(&spec)
}

fn build_scenario(
    spec: &ScenarioSpec,
) -> Result<(AnySsp, StateId, Option<ValueFunction>), Failure> {
    match spec {
        ScenarioSpec::Sharpness(s) => {
            let inst = sharpness_chain(s)?;
            Ok((
                AnySsp::Kernel(inst.model),
                StateId(0),
                Some(inst.surrogate),
            ))
        }
        ScenarioSpec::Gridworld(g) => {
            let d = gridworld_nav(g)?;
            Ok((AnySsp::Disturbance(d), g.start_state(), None))
        }
        ScenarioSpec::Random(r) => {
            let m = random_proper_ssp(r)?;
            Ok((AnySsp::Kernel(m), StateId(0), None))
        }
    }
}

fn missing(flag: &str) -> Failure {
    Failure::new(EXIT_IO, format!("missing required {flag}"))
}

fn resolve_value(
    value: &ValueArgs,
    kernel: &KernelSsp,
    _disturbance: Option<&DisturbanceSsp>,
    instance: &InstanceArgs,
    builtin: Option<ValueFunction>,
) -> Result<ValueFunction, Failure> {
    if let Some(path) = &value.value {
        let raw = io::load_values(path)?;
        return Ok(ValueFunction::new(raw, kernel.terminal())?);
    }
    if value.surrogate_frozen {
        let spec = gridworld_spec_of(instance)?;
        return Ok(frozen_obstacle_value(&spec)?);
    }
    if let Some(offset) = value.value_offset {
        let solved = solve_optimal(kernel)?;
        let values: Vec<f64> = solved
            .value
            .values()
            .iter()
            .enumerate()
            .map(|(x, &v)| {
                if x == kernel.terminal().index() {
                    0.0
                } else {
                    v + offset
                }
            })
            .collect();
        return Ok(ValueFunction::new(values, kernel.terminal())?);
    }
    if let Some(amplitude) = value.value_noise {
        let solved = solve_optimal(kernel)?;
        return Ok(noisy_value(
            &solved.value,
            amplitude,
            value.value_seed,
            kernel.terminal(),
        ));
    }
    if let Some(v) = builtin {
        return Ok(v);
    }
    // No value source: fall back to the solved value (exact rollout).
    Ok(solve_optimal(kernel)?.value)
}

fn gridworld_spec_of(args: &InstanceArgs) -> Result<crate::scenarios::GridworldSpec, Failure> {
    let spec = if let Some(path) = &args.scenario_file {
        io::load_scenario(path)?
    } else {
        return Err(Failure::new(
            EXIT_IO,
            "--surrogate-frozen needs a gridworld --scenario-file",
        ));
    };
    match spec {
        ScenarioSpec::Gridworld(g) => Ok(g),
        _ => Err(Failure::new(
            EXIT_IO,
            "--surrogate-frozen needs a gridworld scenario",
        )),
    }
}

fn cmd_certify(args: &CertifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let instance = resolve_instance(&args.instance, &args.value)?;
    let from = StateId(args.from.unwrap_or(instance.default_start.index()));
    let lyapunov = match (&args.lyapunov, args.c) {
        (Some(path), Some(c)) => Some(Lyapunov {
            values: io::load_values(path)?,
            c,
            uniform: args.uniform_drift,
        }),
        (Some(_), None) => return Err(missing("--c (drift constant for --lyapunov)")),
        (None, Some(_)) => return Err(missing("--lyapunov (values for --c)")),
        (None, None) => None,
    };

    if args.min_time {
        let opts = MinTimeOptions {
            uniform_n: args.uniform_n,
            lyapunov,
        };
        let report = if args.ce {
            let d = instance.disturbance.as_ref().ok_or_else(|| {
                Failure::new(EXIT_IO, "--ce needs a disturbance-form model or scenario")
            })?;
            min_time_certificate_ce(d, &instance.value, from, &opts)?
        } else {
            min_time_certificate(&instance.kernel, &instance.value, from, &opts)?
        };
        return emit_min_time(&report, args, out);
    }

    let opts = CertificateOptions {
        uniform_n: args.uniform_n,
        lyapunov,
        reachable_epsilon: args.reachable_eps,
        local_error: args.local_eps,
        solver_tol: solver_tol(),
        solver_max_iters: CERT_VI_MAX_ITERS,
    };
    let report = if args.ce {
        let d = instance.disturbance.as_ref().ok_or_else(|| {
            Failure::new(EXIT_IO, "--ce needs a disturbance-form model or scenario")
        })?;
        ce_certificate(d, &instance.value, from, &opts)?
    } else {
        rollout_certificate(&instance.kernel, &instance.value, from, &opts)?
    };
    emit_certificate(&report, args, out)
}

fn emit_certificate(
    report: &CertificateReport,
    args: &CertifyArgs,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let text = match args.format {
        OutputFormat::Report => serde_json::to_string_pretty(report).expect("report serializes"),
        OutputFormat::Table => {
            format!("{}\n{}", certificate_table_header(), certificate_table_row(report))
        }
    };
    write_output(&text, args.output.as_deref(), out)?;
    Ok(if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_BOUND_VIOLATION
    })
}

fn emit_min_time(
    report: &MinTimeReport,
    args: &CertifyArgs,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let text = match args.format {
        OutputFormat::Report => serde_json::to_string_pretty(report).expect("report serializes"),
        OutputFormat::Table => {
            let header = "start,h_star,epsilon,delta,expected_tau,bound_multiplicative,certified_excess";
            let row = format!(
                "{},{},{},{},{},{},{}",
                report.start,
                fmt_sig12(report.h_star),
                fmt_sig12(report.epsilon),
                fmt_sig12(report.delta),
                fmt_sig12(report.expected_tau),
                report.bound_multiplicative.map(fmt_sig12).unwrap_or_default(),
                report.certified_excess.map(fmt_sig12).unwrap_or_default(),
            );
            format!("{header}\n{row}")
        }
    };
    write_output(&text, args.output.as_deref(), out)?;
    Ok(if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_BOUND_VIOLATION
    })
}

pub fn certificate_table_header() -> String {
    "start,proper,epsilon,delta,eta,expected_tau,gap,bound_hitting,bound_uniform_n,bound_lyapunov,bound_local,identity_residual,all_passed"
        .to_string()
}

pub fn certificate_table_row(r: &CertificateReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.start,
        r.proper,
        fmt_sig12(r.epsilon),
        fmt_sig12(r.delta),
        fmt_sig12(r.eta),
        fmt_sig12(r.expected_tau),
        fmt_sig12(r.gap),
        fmt_sig12(r.bound_hitting),
        r.bound_uniform_n.map(fmt_sig12).unwrap_or_default(),
        r.bound_lyapunov.map(fmt_sig12).unwrap_or_default(),
        r.bound_local.map(fmt_sig12).unwrap_or_default(),
        fmt_sig12(r.identity_residual),
        r.all_passed(),
    )
}

fn write_output(text: &str, path: Option<&std::path::Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| {
            Failure::new(EXIT_IO, format!("cannot write {}: {e}", p.display()))
        }),
        None => {
            let _ = writeln!(out, "{text}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let family = if args.random {
        "random".to_string()
    } else {
        args.scenario.clone().unwrap_or_else(|| "sharpness".to_string())
    };
    let mut table = String::new();
    let mut any_violation = false;
    match family.as_str() {
        "sharpness" => {
            table.push_str("M,eps,gap,expected_tau,bound,ratio\n");
            for &m in &args.m_list {
                for &eps in &args.eps_list {
                    let inst = sharpness_chain(&SharpnessSpec { m, eps })?;
                    let report = rollout_certificate(
                        &inst.model,
                        &inst.surrogate,
                        StateId(0),
                        &CertificateOptions::default(),
                    )?;
                    let ratio = report.gap / (report.epsilon * report.expected_tau);
                    any_violation |= !report.all_passed();
                    table.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        m,
                        fmt_sig12(eps),
                        fmt_sig12(report.gap),
                        fmt_sig12(report.expected_tau),
                        fmt_sig12(report.bound_hitting),
                        fmt_sig12(ratio),
                    ));
                }
            }
        }
        "random" => {
            table.push_str("seed,proper,epsilon,gap,expected_tau,bound,ratio\n");
            for &seed in &args.seeds {
                let model = random_proper_ssp(&RandomSspSpec {
                    n_states: args.n_states,
                    n_actions: args.n_actions,
                    density: args.density,
                    cost_range: args.cost_range,
                    seed,
                })?;
                let vstar = solve_optimal(&model)?.value;
                let v = noisy_value(&vstar, args.eps0, seed ^ 0x5EED, model.terminal());
                match rollout_certificate(&model, &v, StateId(0), &CertificateOptions::default()) {
                    Ok(report) => {
                        let ratio = if report.epsilon > 0.0 && report.expected_tau > 0.0 {
                            report.gap / (report.epsilon * report.expected_tau)
                        } else {
                            0.0
                        };
                        any_violation |= !report.all_passed();
                        table.push_str(&format!(
                            "{},true,{},{},{},{},{}\n",
                            seed,
                            fmt_sig12(report.epsilon),
                            fmt_sig12(report.gap),
                            fmt_sig12(report.expected_tau),
                            fmt_sig12(report.bound_hitting),
                            fmt_sig12(ratio),
                        ));
                    }
                    // Improper rollout: refused, never bounded.
                    Err(CertificateError::ImproperRollout { .. }) => {
                        table.push_str(&format!("{seed},false,,,,,\n"));
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
        other => {
            return Err(Failure::new(
                EXIT_IO,
                format!("unknown sweep family {other:?}"),
            ))
        }
    }
    write_output(table.trim_end(), args.output.as_deref(), out)?;
    Ok(if any_violation {
        EXIT_BOUND_VIOLATION
    } else {
        EXIT_OK
    })
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let instance = resolve_instance(&args.instance, &args.value)?;
    let from = StateId(args.from.unwrap_or(instance.default_start.index()));
    let pi = match &args.policy {
        Some(path) => {
            let file = io::load_policy(path)?;
            let expected = io::kernel_hash(&instance.kernel);
            if file.model_hash != expected {
                return Err(Failure::new(
                    EXIT_INVALID,
                    format!(
                        "policy was built against model {} but this model hashes to {expected}",
                        file.model_hash
                    ),
                ));
            }
            StationaryPolicy::new(
                file.actions.iter().map(|&a| crate::model::ActionId(a)).collect(),
                &instance.kernel,
            )?
        }
        None => greedy_policy(&instance.kernel, &instance.value).0,
    };
    let model_ref = match &instance.disturbance {
        Some(d) => ModelRef::Disturbance(d),
        None => ModelRef::Kernel(&instance.kernel),
    };
    let report = estimate(model_ref, &pi, from, args.reps, args.seed, args.max_steps);
    let mut payload = serde_json::to_value(&report).expect("report serializes");

    let mut code = EXIT_OK;
    if args.cross_check {
        let exact_cost = policy_evaluation_exact(&instance.kernel, &pi, from)?.value;
        let exact_tau = hitting_time_exact(&instance.kernel, &pi, from)?;
        let cost_ok = (report.mean_cost - exact_cost).abs() <= report.half_width_cost;
        let tau_ok = (report.mean_tau - exact_tau).abs() <= report.half_width_tau;
        let obj = payload.as_object_mut().expect("report is an object");
        obj.insert("exact_cost".into(), exact_cost.into());
        obj.insert("exact_tau".into(), exact_tau.into());
        obj.insert("cross_check_cost_ok".into(), cost_ok.into());
        obj.insert("cross_check_tau_ok".into(), tau_ok.into());
        if !(cost_ok && tau_ok && report.valid) {
            code = EXIT_BOUND_VIOLATION;
        }
    }
    let text = serde_json::to_string_pretty(&payload).expect("payload serializes");
    write_output(&text, args.output.as_deref(), out)?;
    Ok(code)
}
