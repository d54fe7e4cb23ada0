//! Command-line front end: evolution, synthesis, teleportation, the
//! correction table and the verification batteries, with JSON/CSV reports.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ising_teleport::evolution::{evolution_closed_form, evolution_oracle};
use ising_teleport::synthesis::{solve_two_pulse_with, IntRange, Rejection};
use ising_teleport::teleport::{reproduce_table1, run_multiqubit, run_single, MultiQubitReport, WireLayout};
use ising_teleport::tolerance;
use ising_teleport::verify::{run_suite, Suite, SuiteReport, VerifyOptions};
use ising_teleport::{
    CorrectionPlan, Coupling, Direction, Error, GateTarget, Matrix, MeasurementMode, MultiQubitPlan, Problem,
    SearchBounds, State, TeleportConfig, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Version of every JSON document this tool writes.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "ising-teleport", version, about = "Ising-gate evolution, pulse synthesis and teleportation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form and numerically exponentiated evolution operators.
    Evolve(EvolveArgs),
    /// Two-pulse synthesis of a controlled gate.
    Synth(SynthArgs),
    /// Single- or multi-qubit teleportation report.
    Teleport(TeleportArgs),
    /// Regenerates the measurement/correction table as CSV.
    Table1(Table1Args),
    /// Runs invariant batteries.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Coupling configuration (`J`, `B1`, `B2`, `h`, optional `t`).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Field direction, overriding the file.
    #[arg(long)]
    pub h: Option<u8>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Synthesis problem, bare or in fixture form (`target` + `problem`).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, requires = "j")]
    pub h: Option<u8>,
    #[arg(long, requires = "h")]
    pub j: Option<u8>,
    /// Integer search box, e.g. `n_anti=0..4,s_twice=-3..3`.
    #[arg(long, allow_hyphen_values = true)]
    pub bounds: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Enumerate,
    Sample,
}

#[derive(Debug, Args)]
pub struct TeleportArgs {
    /// Single-qubit config or multi-qubit plan (`wires`); defaults to
    /// `A_1,2` with `β00` and Bell measurement.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Input amplitudes as `re,im` pairs, e.g. `0.6,0,0,0.8`.
    #[arg(long, allow_hyphen_values = true)]
    pub amplitudes: Option<String>,
    /// Seeds the random input (when no amplitudes are given) and sampling.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    /// Random inputs per row.
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// closed_form, spectrum, blocks, synthesis, corrections, table1 or all.
    #[arg(default_value = "all")]
    pub suite: String,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random configurations per direction.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

/// How a command ended.
#[derive(Debug)]
pub enum CliError {
    /// Bad input; exit 2.
    Input(anyhow::Error),
    /// The computation ran and the answer is negative; exit 1.
    Negative(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Negative(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(e) => write!(f, "input error: {e:#}"),
            CliError::Negative(e) => write!(f, "{e:#}"),
        }
    }
}

fn input_err(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Input(e.into())
}

/// Library errors split by whether the caller could have avoided them.
fn core_err(e: Error) -> CliError {
    match e {
        Error::ProtocolBreakage(_) | Error::PatternViolation { .. } | Error::NotHermitian { .. } => {
            CliError::Negative(e.into())
        }
        _ => CliError::Input(e.into()),
    }
}

type CmdResult = Result<(), CliError>;

/// Embedded in every report; equal manifests give byte-identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub command: String,
    pub tool_version: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub tolerances: BTreeMap<String, f64>,
}

impl RunManifest {
    fn new(command: &str, config: &impl Serialize, seed: Option<u64>, tolerances: &[(&str, f64)]) -> Self {
        RunManifest {
            format_version: FORMAT_VERSION,
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: serde_json::to_value(config).expect("serializable config"),
            seed,
            tolerances: tolerances.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(input_err)?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).map_err(input_err)
}

fn from_value<T: for<'de> Deserialize<'de>>(v: Value, what: &str) -> Result<T, CliError> {
    serde_json::from_value(v).with_context(|| format!("invalid {what}")).map_err(input_err)
}

fn emit(output: &Output, body: &str, stdout: &mut dyn Write) -> CmdResult {
    match &output.out {
        Some(path) => {
            std::fs::write(path, body).with_context(|| format!("writing {}", path.display())).map_err(input_err)
        }
        None => stdout.write_all(body.as_bytes()).context("writing stdout").map_err(input_err),
    }
}

fn emit_json(output: &Output, report: &impl Serialize, stdout: &mut dyn Write) -> CmdResult {
    let mut body = serde_json::to_string_pretty(report).expect("serializable report");
    body.push('\n');
    emit(output, &body, stdout)
}

fn check_tol(tol: Option<f64>, default: f64) -> Result<f64, CliError> {
    let t = tol.unwrap_or(default);
    if !(t.is_finite() && t > 0.0) {
        return Err(input_err(anyhow!("tolerance must be positive and finite, got {t}")));
    }
    Ok(t)
}

#[derive(Debug, Serialize)]
struct EvolveReport {
    manifest: RunManifest,
    config: Coupling,
    t: f64,
    closed_form: Matrix,
    oracle: Matrix,
    distance: f64,
    within_tolerance: bool,
}

#[derive(Debug, Deserialize)]
struct EvolveInput {
    #[serde(flatten)]
    config: Coupling,
    t: Option<f64>,
}

pub fn cmd_evolve(args: &EvolveArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let tol = check_tol(args.tol, tolerance::CROSS_VALIDATION)?;
    let EvolveInput { mut config, t } = from_value(read_json(&args.config)?, "coupling configuration")?;
    if let Some(h) = args.h {
        config.h = Direction::new(h).map_err(core_err)?;
    }
    config.validate().map_err(core_err)?;
    let t = args.t.or(t).ok_or_else(|| input_err(anyhow!("no evolution time: pass --t or set \"t\"")))?;
    let closed = evolution_closed_form(&config, t).map_err(core_err)?;
    let oracle = evolution_oracle(&config, t).map_err(core_err)?;
    let distance = closed.matrix.distance(&oracle.matrix).map_err(core_err)?;
    let within_tolerance = distance < tol;
    let manifest = RunManifest::new("evolve", &(&config, t), None, &[("cross_validation", tol)]);
    let report = EvolveReport {
        manifest,
        config,
        t,
        closed_form: closed.matrix,
        oracle: oracle.matrix,
        distance,
        within_tolerance,
    };
    emit_json(&args.output, &report, stdout)?;
    let _ = writeln!(stderr, "closed form vs oracle: {distance:.3e} (tolerance {tol:.0e})");
    if within_tolerance {
        Ok(())
    } else {
        Err(CliError::Negative(anyhow!("closed form differs from the oracle by {distance:.3e}")))
    }
}

/// Parses `name=lo..hi` items separated by commas; unnamed fields keep
/// their defaults.
pub fn parse_bounds(spec: &str, mut bounds: SearchBounds) -> anyhow::Result<SearchBounds> {
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, range) = item.split_once('=').ok_or_else(|| anyhow!("expected name=lo..hi, got {item:?}"))?;
        let (lo, hi) = range.split_once("..").ok_or_else(|| anyhow!("expected lo..hi, got {range:?}"))?;
        let r = IntRange::new(lo.trim().parse()?, hi.trim().parse()?);
        match name.trim() {
            "n_anti" => bounds.n_anti = r,
            "n_anti_prime" => bounds.n_anti_prime = r,
            "m_plus_n" => bounds.m_plus_n = r,
            "n_diag" => bounds.n_diag = r,
            "s_twice" => bounds.s_twice = r,
            other => bail!("unknown bound {other:?}"),
        }
    }
    Ok(bounds)
}

#[derive(Debug, Serialize)]
struct SynthReport {
    manifest: RunManifest,
    #[serde(flatten)]
    report: ising_teleport::Report,
}

pub fn cmd_synth(args: &SynthArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let tol = check_tol(args.tol, tolerance::SYNTHESIS)?;
    let mut raw = read_json(&args.config)?;
    let file_target = match raw.get("target") {
        Some(t) => Some(from_value::<GateTarget>(t.clone(), "target")?),
        None => None,
    };
    if let Some(p) = raw.get_mut("problem") {
        raw = p.take();
    }
    let mut problem: Problem = from_value(raw, "synthesis problem")?;
    let target = match (args.h, args.j, file_target) {
        (Some(h), Some(j), _) => ising_teleport::synthesis::gate_library(h, j).map_err(core_err)?,
        (_, _, Some(t)) => t,
        _ => GateTarget::all()
            .find(|g| g.h() == problem.h && g.alpha_diag() == problem.alpha_diag)
            .expect("every (h, α) pair names a library gate"),
    };
    problem.h = target.h();
    problem.alpha_diag = target.alpha_diag();
    if let Some(spec) = &args.bounds {
        problem.bounds = parse_bounds(spec, problem.bounds).map_err(input_err)?;
    }
    problem.validate().map_err(core_err)?;
    let manifest = RunManifest::new("synth", &(&target, &problem), None, &[("synthesis", tol)]);
    let report = solve_two_pulse_with(&problem, target, tol).map_err(core_err)?;
    let feasible = report.feasible;
    let summary = match (&report.sequence, report.residual) {
        (Some(seq), Some(r)) => format!("{target}: feasible, total time {:.12}, residual {r:.3e}", seq.total_time()),
        _ => format!("{target}: infeasible, rejections {}", histogram(&report.rejected_candidates)),
    };
    emit_json(&args.output, &SynthReport { manifest, report }, stdout)?;
    let _ = writeln!(stderr, "{summary}");
    if feasible {
        Ok(())
    } else {
        Err(CliError::Negative(anyhow!("no verified pulse sequence")))
    }
}

fn histogram(h: &BTreeMap<Rejection, usize>) -> String {
    if h.is_empty() {
        return "none (no candidates in bounds)".into();
    }
    h.iter().map(|(k, v)| format!("{k:?}={v}")).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Serialize)]
struct CorrectionView {
    #[serde(flatten)]
    plan: CorrectionPlan,
    gates: String,
}

impl From<CorrectionPlan> for CorrectionView {
    fn from(plan: CorrectionPlan) -> Self {
        CorrectionView { plan, gates: plan.to_string() }
    }
}

#[derive(Debug, Serialize)]
struct BranchView {
    outcomes: Vec<(u8, u8)>,
    probability: f64,
    corrections: Vec<CorrectionView>,
    fidelity: f64,
    relative_phase: f64,
    output: Option<State>,
}

#[derive(Debug, Serialize)]
struct TeleportReport {
    manifest: RunManifest,
    input: State,
    #[serde(skip_serializing_if = "Option::is_none")]
    layout: Option<Vec<WireLayout>>,
    branches: Vec<BranchView>,
    total_probability: f64,
    min_fidelity: f64,
    success: bool,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum TeleportPlan {
    Single(TeleportConfig),
    Multi(MultiQubitPlan),
}

impl TeleportPlan {
    fn width(&self) -> usize {
        match self {
            TeleportPlan::Single(_) => 1,
            TeleportPlan::Multi(p) => p.wires.len(),
        }
    }

    fn set_mode(&mut self, mode: MeasurementMode) {
        match self {
            TeleportPlan::Single(c) => c.mode = mode,
            TeleportPlan::Multi(p) => p.mode = mode,
        }
    }
}

fn parse_amplitudes(spec: &str) -> anyhow::Result<Vec<C64>> {
    let xs: Vec<f64> = spec.split(',').map(|s| s.trim().parse::<f64>()).collect::<Result<_, _>>()?;
    if !xs.len().is_multiple_of(2) {
        bail!("amplitudes come in re,im pairs; got {} numbers", xs.len());
    }
    Ok(xs.chunks(2).map(|p| C64::new(p[0], p[1])).collect())
}

fn random_input(n: usize, seed: u64) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let amps: Vec<C64> =
            (0..1 << n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        if let Ok(s) = State::normalized_from(amps) {
            return s;
        }
    }
}

pub fn cmd_teleport(args: &TeleportArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let tol = check_tol(args.tol, tolerance::TELEPORT_FIDELITY)?;
    let mut plan = match &args.config {
        None => TeleportPlan::Single(TeleportConfig::default()),
        Some(path) => {
            let raw = read_json(path)?;
            if raw.get("wires").is_some() {
                TeleportPlan::Multi(from_value(raw, "multi-qubit plan")?)
            } else {
                TeleportPlan::Single(from_value(raw, "teleport config")?)
            }
        }
    };
    let seed = args.seed.unwrap_or(0);
    match args.mode {
        Some(ModeArg::Enumerate) => plan.set_mode(MeasurementMode::Enumerate),
        Some(ModeArg::Sample) => plan.set_mode(MeasurementMode::Sample(seed)),
        None => {}
    }
    let n = plan.width();
    let input = match &args.amplitudes {
        Some(spec) => {
            let amps = parse_amplitudes(spec).map_err(input_err)?;
            if amps.len() != 1 << n {
                return Err(input_err(anyhow!("{n}-qubit input needs {} amplitudes, got {}", 1 << n, amps.len())));
            }
            State::from_amplitudes(amps).map_err(core_err)?
        }
        None => random_input(n, seed),
    };

    let (layout, branches) = match &plan {
        TeleportPlan::Single(cfg) => {
            let [al, be] = [input.amplitudes()[0], input.amplitudes()[1]];
            let outs = run_single(cfg, al, be).map_err(core_err)?;
            let branches: Vec<BranchView> = outs
                .into_iter()
                .map(|o| BranchView {
                    outcomes: vec![(o.record.m1, o.record.m2)],
                    probability: o.record.probability,
                    corrections: vec![o.correction.into()],
                    fidelity: o.fidelity,
                    relative_phase: o.relative_phase,
                    output: Some(o.output),
                })
                .collect();
            (None, branches)
        }
        TeleportPlan::Multi(p) => {
            let MultiQubitReport { layout, branches, .. } = run_multiqubit(&input, p).map_err(core_err)?;
            let branches = branches
                .into_iter()
                .map(|b| BranchView {
                    outcomes: b.outcomes,
                    probability: b.probability,
                    corrections: b.corrections.into_iter().map(Into::into).collect(),
                    fidelity: b.fidelity,
                    relative_phase: b.relative_phase,
                    output: None,
                })
                .collect();
            (Some(layout), branches)
        }
    };
    let total_probability = branches.iter().map(|b| b.probability).sum::<f64>();
    let min_fidelity = branches.iter().map(|b| b.fidelity).fold(f64::INFINITY, f64::min);
    let success = !branches.is_empty() && min_fidelity > 1.0 - tol;
    let manifest = RunManifest::new("teleport", &plan, Some(seed), &[("teleport_fidelity", tol)]);
    let count = branches.len();
    let report = TeleportReport { manifest, input, layout, branches, total_probability, min_fidelity, success };
    emit_json(&args.output, &report, stdout)?;
    let _ = writeln!(stderr, "{count} branch(es), min fidelity {min_fidelity:.15}");
    if success {
        Ok(())
    } else {
        Err(CliError::Negative(anyhow!("teleportation fidelity below 1 - {tol:.0e}")))
    }
}

pub fn cmd_table1(args: &Table1Args, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    if args.trials == 0 {
        return Err(input_err(anyhow!("--trials must be at least 1")));
    }
    let rows = reproduce_table1(args.trials, args.seed).map_err(core_err)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "basis",
        "measurement",
        "teleported_state",
        "printed_state",
        "state_matches",
        "complementary_gates",
        "oracle_gates",
        "gates_match",
        "min_fidelity",
        "trials",
    ])
    .map_err(input_err)?;
    for r in &rows {
        let basis = serde_json::to_value(r.basis).expect("basis");
        w.write_record([
            basis.as_str().unwrap_or_default().to_string(),
            r.measurement.clone(),
            r.simulated_state.clone(),
            r.printed_state.clone(),
            r.state_matches.to_string(),
            r.printed_gates.clone(),
            r.oracle_gates.clone(),
            r.gates_match.to_string(),
            format!("{:.15}", r.min_fidelity),
            r.trials.to_string(),
        ])
        .map_err(input_err)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| input_err(anyhow!("{e}")))?).expect("utf-8 csv");
    emit(&args.output, &body, stdout)?;
    let reproduced = rows.iter().filter(|r| r.reproduced()).count();
    let _ = writeln!(stderr, "{reproduced}/{} rows reproduced", rows.len());
    if reproduced == rows.len() {
        Ok(())
    } else {
        Err(CliError::Negative(anyhow!("{} row(s) not reproduced", rows.len() - reproduced)))
    }
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    manifest: RunManifest,
    suites: Vec<SuiteReport>,
    passed: bool,
}

pub fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let suites: Vec<Suite> =
        if args.suite == "all" { Suite::ALL.to_vec() } else { vec![args.suite.parse().map_err(core_err)?] };
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        seed: args.seed.unwrap_or(defaults.seed),
        samples: args.samples.unwrap_or(defaults.samples),
        tol: args.tol.map(|t| check_tol(Some(t), t)).transpose()?,
        ..defaults
    };
    let reports: Vec<SuiteReport> = suites.iter().map(|&s| run_suite(s, &opts)).collect();
    for r in &reports {
        let _ = writeln!(
            stderr,
            "{} {}: {}/{} (worst {:.3e}, tolerance {:.0e})",
            if r.ok() { "PASS" } else { "FAIL" },
            r.suite,
            r.passed,
            r.checks,
            r.worst,
            r.tolerance
        );
        for note in r.notes.iter().chain(&r.failures) {
            let _ = writeln!(stderr, "    {note}");
        }
    }
    let passed = reports.iter().all(SuiteReport::ok);
    let tolerances: Vec<(&str, f64)> = reports.iter().map(|r| (r.suite.name(), r.tolerance)).collect();
    let manifest = RunManifest::new("verify", &(&args.suite, &opts), Some(opts.seed), &tolerances);
    emit_json(&args.output, &VerifyReport { manifest, suites: reports, passed }, stdout)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Negative(anyhow!("verification failed")))
    }
}

/// Runs one command; returns the process exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Evolve(a) => cmd_evolve(a, stdout, stderr),
        Command::Synth(a) => cmd_synth(a, stdout, stderr),
        Command::Teleport(a) => cmd_teleport(a, stdout, stderr),
        Command::Table1(a) => cmd_table1(a, stdout, stderr),
        Command::Verify(a) => cmd_verify(a, stdout, stderr),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_spec() {
        let b = parse_bounds("n_anti=1..2, s_twice=-1..1", SearchBounds::default()).unwrap();
        assert_eq!(b.n_anti, IntRange::new(1, 2));
        assert_eq!(b.s_twice, IntRange::new(-1, 1));
        assert_eq!(b.n_diag, SearchBounds::default().n_diag);
        assert!(parse_bounds("n_anti=3..1", SearchBounds::default()).unwrap().is_empty());
        assert!(parse_bounds("bogus=0..1", SearchBounds::default()).is_err());
        assert!(parse_bounds("n_anti=0", SearchBounds::default()).is_err());
    }

    #[test]
    fn amplitude_pairs() {
        let a = parse_amplitudes("0.6, 0, 0, -0.8").unwrap();
        assert_eq!(a, [C64::new(0.6, 0.0), C64::new(0.0, -0.8)]);
        assert!(parse_amplitudes("1,0,0").is_err());
    }

    #[test]
    fn random_inputs_are_seeded() {
        assert_eq!(random_input(2, 42), random_input(2, 42));
        assert_ne!(random_input(1, 1), random_input(1, 2));
    }
}
