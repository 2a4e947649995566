//! The `arrival` command line. Every subcommand is a function from input
//! documents to an [`Output`]; [`run_cli`] wires them to files and stdio.
//!
//! Exit codes: 0 success or valid, 1 invalid or falsified, 2 usage error
//! (including unreadable or malformed input files).

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use arrival_core::check::{run_suite, CheckConfig, CheckReport, Property};
use arrival_core::flows::{check_bounds, complete, verify, BoundReport, FlowCheckReport, FlowDocument};
use arrival_core::graph::{parse, serialize, to_dot};
use arrival_core::local_search::{
    build_instance, default_walk_budget, walk_localopt, walk_sink_of_path, BitString, LocalOpt, SearchState,
    SinkOfPath,
};
use arrival_core::simulator::{run_observed, run_prefix, RunOptions, DEFAULT_CYCLE_THRESHOLD};
use arrival_core::{
    augment, decide_arrival, generate, solve_s_arrival, ArrivalError, CertificateKind, FlowVector, GeneratorSpec,
    Model, SwitchGraph,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "arrival", version, about = "Switch-graph ARRIVAL: simulate, reduce, verify, walk, solve")]
pub struct Cli {
    /// Input file (default: stdin).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,

    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Machine-readable JSON reports.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WalkMode {
    Localopt,
    SinkOfPath,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded random switch graph (origin 0, destination n - 1).
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "uniform")]
        model: Model,
        #[arg(long, value_enum, default_value_t = GraphFormat::Json)]
        format: GraphFormat,
    },
    /// Run the RUN procedure and report its outcome.
    Simulate {
        #[arg(long)]
        budget: Option<u64>,
        /// Emit one line per step.
        #[arg(long)]
        trace: bool,
    },
    /// Decide whether RUN reaches the destination.
    Decide,
    /// Build the augmented graph H and its sidecar.
    Reduce {
        /// Where to write the sidecar; without it the sidecar is the second
        /// line of the output.
        #[arg(long)]
        sidecar: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = GraphFormat::Json)]
        format: GraphFormat,
    },
    /// Check a flow document against the input graph.
    VerifyFlow {
        #[arg(long)]
        flow: PathBuf,
    },
    /// Complete a switching flow of (H, ō, u) to one of H's sinks. The input
    /// is the original graph G.
    Complete(CompleteArgs),
    /// Walk the LOCALOPT instance of the input graph.
    Walk {
        /// Hex-encoded start state, or "reset".
        #[arg(long, default_value = "reset")]
        start: String,
        #[arg(long)]
        budget: Option<u64>,
        /// Emit every visited state.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = WalkMode::Localopt)]
        mode: WalkMode,
    },
    /// Solve S-ARRIVAL and print the certificate.
    Solve,
    /// Run the property suite over seeded random graphs.
    Check {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        completions: usize,
        /// Check against a deliberately broken flow verifier.
        #[arg(long)]
        mutate: bool,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct CompleteArgs {
    /// Flow document over H's slots with origin ō.
    #[arg(long)]
    pub flow: Option<PathBuf>,
    /// Use the RUN prefix of H after this many steps as the input flow.
    #[arg(long)]
    pub prefix: Option<u64>,
}

/// What a command produced: text for the output and an exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub body: String,
    pub code: u8,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, code: EXIT_OK }
    }

    fn with_code(body: String, valid: bool) -> Self {
        Output { body, code: if valid { EXIT_OK } else { EXIT_INVALID } }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(PathBuf, std::io::Error),
    Arrival(ArrivalError),
    Json(serde_json::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Arrival(e) => write!(f, "{e}"),
            CliError::Json(e) => write!(f, "malformed document at line {}, column {}: {e}", e.line(), e.column()),
        }
    }
}

impl From<ArrivalError> for CliError {
    fn from(e: ArrivalError) -> Self {
        CliError::Arrival(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Arrival(
                ArrivalError::Precondition(_)
                | ArrivalError::Internal(_)
                | ArrivalError::CompletionDidNotTerminate { .. }
                | ArrivalError::WalkBudgetExhausted { .. }
                | ArrivalError::NonConformingOptimum { .. }
                | ArrivalError::PrefixBeyondTermination { .. }
                | ArrivalError::PrefixBeyondBudget { .. }
                | ArrivalError::Overflow(_),
            ) => EXIT_INVALID,
            _ => EXIT_USAGE,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("reports serialize")
}

fn read_path(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

pub fn cmd_gen(n: usize, seed: u64, model: Model, format: GraphFormat) -> CliResult<Output> {
    if n < 2 {
        return Err(CliError::Usage(format!("--n must be at least 2, got {n}")));
    }
    let g = generate(&GeneratorSpec { n, seed, model })?;
    Ok(Output::ok(match format {
        GraphFormat::Json => serialize(&g) + "\n",
        GraphFormat::Dot => to_dot(&g),
    }))
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    #[serde(flatten)]
    outcome: &'a arrival_core::RunOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<String>>,
}

pub fn cmd_simulate(graph: &str, budget: Option<u64>, trace: bool, json: bool) -> CliResult<Output> {
    let g = parse(graph)?;
    let mut lines = Vec::new();
    let opts = RunOptions { budget, ..RunOptions::default() };
    let outcome = run_observed(&g, &opts, |i, step| {
        if trace {
            lines.push(step.trace_line(i));
        }
    })?;
    let body = if json {
        to_json(&SimulateReport { outcome: &outcome, trace: trace.then_some(lines) }) + "\n"
    } else {
        let mut s: String = lines.iter().map(|l| format!("{l}\n")).collect();
        let verdict = serde_json::to_value(outcome.verdict).expect("verdict serializes");
        s += &format!("verdict: {}\n", verdict.as_str().unwrap_or_default());
        s += &format!("steps: {}\n", outcome.steps);
        s += &format!("final vertex: {}\n", outcome.final_vertex);
        s += &format!("profile: {}\n", to_json(&outcome.profile));
        if let Some(w) = &outcome.cycle_witness {
            s += &format!(
                "repeated state: vertex {} switches {} at steps {} and {}\n",
                w.vertex, w.config, w.first_step, w.second_step
            );
        }
        s
    };
    Ok(Output::ok(body))
}

pub fn cmd_decide(graph: &str, json: bool) -> CliResult<Output> {
    let d = decide_arrival(&parse(graph)?)?;
    Ok(Output::ok(if json {
        to_json(&serde_json::json!({ "decision": d.as_str() })) + "\n"
    } else {
        format!("{d}\n")
    }))
}

/// Returns H (as JSON or DOT) and the sidecar JSON.
pub fn cmd_reduce(graph: &str, format: GraphFormat) -> CliResult<(String, String)> {
    let aug = augment(&parse(graph)?);
    let h = match format {
        GraphFormat::Json => serialize(&aug.h) + "\n",
        GraphFormat::Dot => to_dot(&aug.h),
    };
    Ok((h, to_json(&aug.sidecar()) + "\n"))
}

#[derive(Debug, Serialize)]
pub struct VerifyFlowReport {
    #[serde(flatten)]
    pub check: FlowCheckReport,
    /// Present for certificates: whether `kind` matches the destination.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind_matches_dest: Option<bool>,
}

/// Verifies a flow or certificate document against a graph. A certificate
/// of kind `termination` must end at the graph's destination, one of kind
/// `non-termination` elsewhere.
pub fn cmd_verify_flow(graph: &str, flow: &str, json: bool) -> CliResult<Output> {
    let g = parse(graph)?;
    let doc: FlowDocument = serde_json::from_str(flow)?;
    let check = verify(&g, doc.origin, doc.dest, &doc.counts)?;
    let kind_matches_dest = doc.kind.map(|k| match k {
        CertificateKind::Termination => doc.dest == g.dest(),
        CertificateKind::NonTermination => doc.dest != g.dest(),
    });
    let valid = check.valid && kind_matches_dest.unwrap_or(true);
    let report = VerifyFlowReport { check, kind_matches_dest };
    let body = if json {
        to_json(&report) + "\n"
    } else {
        let mut s = format!("{}\n", if valid { "valid" } else { "invalid" });
        for c in &report.check.conservation_violations {
            s += &format!(
                "conservation violation at vertex {}: net outflow {}, required {}\n",
                c.vertex, c.found, c.required
            );
        }
        for p in &report.check.parity_violations {
            s += &format!("parity violation at vertex {}: even {}, odd {}\n", p.vertex, p.even, p.odd);
        }
        if kind_matches_dest == Some(false) {
            s += "certificate kind does not match its destination\n";
        }
        s
    };
    Ok(Output::with_code(body, valid))
}

#[derive(Serialize)]
struct CompleteReport {
    reached: arrival_core::Terminal,
    reached_vertex: usize,
    z: FlowDocument,
    bounds: BoundReport,
}

pub enum CompleteInput<'a> {
    Flow(&'a str),
    Prefix(u64),
}

pub fn cmd_complete(graph: &str, input: CompleteInput<'_>, json: bool) -> CliResult<Output> {
    let g = parse(graph)?;
    let aug = augment(&g);
    let (u, x) = match input {
        CompleteInput::Flow(text) => {
            let doc: FlowDocument = serde_json::from_str(text)?;
            if doc.origin != aug.o_bar {
                return Err(ArrivalError::Precondition(format!(
                    "flow origin must be ō = {}, got {}",
                    aug.o_bar, doc.origin
                ))
                .into());
            }
            (doc.dest, doc.counts)
        }
        CompleteInput::Prefix(t) => {
            let p = run_prefix(&aug.h, t)?;
            (p.vertex, p.profile)
        }
    };
    let c = complete(&aug, u, &x)?;
    let bounds = check_bounds(&aug, &c.z, c.reached_vertex)?;
    let pass = bounds.pass;
    let report = CompleteReport {
        reached: c.reached,
        reached_vertex: c.reached_vertex,
        z: FlowDocument { origin: aug.o_bar, dest: c.reached_vertex, counts: c.z, kind: None },
        bounds,
    };
    let body = if json {
        to_json(&report) + "\n"
    } else {
        let mut s = format!("reached: {} (vertex {})\n", report.reached.as_str(), report.reached_vertex);
        s += &format!("z: {}\n", to_json(&report.z.counts));
        s += &format!("bounds: {}\n", if pass { "pass" } else { "FAIL" });
        for v in &report.bounds.violations {
            s += &format!("  violation: {}\n", to_json(v));
        }
        for f in &report.bounds.flags {
            s += &format!("  flag: sink slot {:?} holds {}\n", f.slot, f.value);
        }
        s
    };
    Ok(Output::with_code(body, pass))
}

#[derive(Serialize)]
struct StateView {
    vertex: usize,
    flow: FlowVector,
    bits: String,
    potential: i64,
}

#[derive(Serialize)]
struct WalkReport {
    mode: &'static str,
    solution: StateView,
    steps: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<StateView>>,
}

pub fn cmd_walk(
    graph: &str,
    start: &str,
    budget: Option<u64>,
    trace: bool,
    mode: WalkMode,
    json: bool,
) -> CliResult<Output> {
    let inst = build_instance(augment(&parse(graph)?))?;
    let start_state = if start == "reset" {
        inst.reset_state()
    } else {
        inst.decode(&BitString::from_hex(start, inst.encoded_len())?)
    };
    let budget = budget.unwrap_or_else(|| default_walk_budget(inst.m()));
    let view = |s: &SearchState| StateView {
        vertex: s.vertex,
        flow: s.flow.clone(),
        bits: inst.encode(s).expect("walk states lie in the domain").to_hex(),
        potential: inst.potential(s),
    };
    let (solution, steps, states) = match mode {
        WalkMode::Localopt => {
            let out = walk_localopt(&inst, start_state, budget, trace)?;
            (out.solution, out.steps, out.trace)
        }
        WalkMode::SinkOfPath => {
            let (solution, r) = walk_sink_of_path(&SinkOfPath { instance: &inst, start: start_state.clone() }, budget)?;
            let states = trace
                .then(|| walk_localopt(&inst, start_state, budget, true).map(|o| o.trace.unwrap_or_default()))
                .transpose()?;
            (solution, r, states)
        }
    };
    let report = WalkReport {
        mode: match mode {
            WalkMode::Localopt => "localopt",
            WalkMode::SinkOfPath => "sink-of-path",
        },
        solution: view(&solution),
        steps,
        trace: states.map(|t| t.iter().map(view).collect()),
    };
    let body = if json {
        to_json(&report) + "\n"
    } else {
        let mut s = String::new();
        if let Some(t) = &report.trace {
            for (i, st) in t.iter().enumerate() {
                s += &format!("state {i}: vertex {} potential {} flow {}\n", st.vertex, st.potential, to_json(&st.flow));
            }
        }
        let label = if mode == WalkMode::SinkOfPath { "r" } else { "steps" };
        s += &format!("solution: vertex {} potential {}\n", report.solution.vertex, report.solution.potential);
        s += &format!("flow: {}\n", to_json(&report.solution.flow));
        s += &format!("bits: {}\n", report.solution.bits);
        s += &format!("{label}: {}\n", report.steps);
        s
    };
    Ok(Output::ok(body))
}

pub fn cmd_solve(graph: &str) -> CliResult<Output> {
    Ok(Output::ok(to_json(&solve_s_arrival(&parse(graph)?)?) + "\n"))
}

pub fn cmd_check(cfg: &CheckConfig, json: bool) -> CliResult<Output> {
    if !(2..=DEFAULT_CYCLE_THRESHOLD).contains(&cfg.n_max) {
        return Err(CliError::Usage(format!(
            "--n-max must lie in 2..={DEFAULT_CYCLE_THRESHOLD}, got {}",
            cfg.n_max
        )));
    }
    let report: CheckReport = run_suite(cfg);
    let body = if json {
        to_json(&report) + "\n"
    } else {
        let mut s = format!(
            "instances: {} ({} terminating, {} not)\n",
            report.instances,
            report.terminating,
            report.instances - report.terminating
        );
        for t in report.tallies.iter().filter(|t| t.checks > 0 || t.property != Property::Execution) {
            s += &format!("{:<18} {:>8} checks {:>4} failures\n", t.property.name(), t.checks, t.failures);
        }
        match &report.first_failure {
            None => s += "all properties hold\n",
            Some(f) => {
                s += &format!("FAILED {} on instance {}: {}\n", f.property.name(), f.instance, f.detail);
                s += &format!(
                    "reproduce: arrival gen --n {} --seed {} --model {}\n",
                    f.generator.n, f.generator.seed, f.generator.model
                );
                s += &format!("instance: {}\n", f.graph);
            }
        }
        s
    };
    Ok(Output::with_code(body, report.pass))
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run_cli<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
    };
    match execute(&cli, stdin, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read, stdout: &mut dyn Write) -> CliResult<u8> {
    let mut read_input = || -> CliResult<String> {
        match &cli.input {
            Some(p) => read_path(p),
            None => {
                let mut s = String::new();
                stdin.read_to_string(&mut s).map_err(|e| CliError::Io(PathBuf::from("<stdin>"), e))?;
                Ok(s)
            }
        }
    };
    let out = match &cli.command {
        Command::Gen { n, seed, model, format } => cmd_gen(*n, *seed, *model, *format)?,
        Command::Simulate { budget, trace } => cmd_simulate(&read_input()?, *budget, *trace, cli.json)?,
        Command::Decide => cmd_decide(&read_input()?, cli.json)?,
        Command::Reduce { sidecar, format } => {
            let (h, side) = cmd_reduce(&read_input()?, *format)?;
            match sidecar {
                Some(p) => {
                    fs::write(p, &side).map_err(|e| CliError::Io(p.clone(), e))?;
                    Output::ok(h)
                }
                None => Output::ok(h + &side),
            }
        }
        Command::VerifyFlow { flow } => cmd_verify_flow(&read_input()?, &read_path(flow)?, cli.json)?,
        Command::Complete(args) => {
            let graph = read_input()?;
            match (&args.flow, args.prefix) {
                (Some(p), _) => cmd_complete(&graph, CompleteInput::Flow(&read_path(p)?), cli.json)?,
                (None, Some(t)) => cmd_complete(&graph, CompleteInput::Prefix(t), cli.json)?,
                (None, None) => return Err(CliError::Usage("one of --flow or --prefix is required".into())),
            }
        }
        Command::Walk { start, budget, trace, mode } => {
            cmd_walk(&read_input()?, start, *budget, *trace, *mode, cli.json)?
        }
        Command::Solve => cmd_solve(&read_input()?)?,
        Command::Check { n_max, count, seed, completions, mutate } => {
            let cfg = CheckConfig {
                n_max: *n_max,
                count: *count,
                seed: *seed,
                completions_per_instance: *completions,
                mutate: *mutate,
            };
            cmd_check(&cfg, cli.json)?
        }
    };
    match &cli.output {
        Some(p) => fs::write(p, &out.body).map_err(|e| CliError::Io(p.clone(), e))?,
        None => stdout
            .write_all(out.body.as_bytes())
            .map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e))?,
    }
    Ok(out.code)
}

/// Parses a graph document, for callers holding raw text.
pub fn parse_graph(text: &str) -> CliResult<SwitchGraph> {
    Ok(parse(text)?)
}
