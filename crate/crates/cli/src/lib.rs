//! `latlin` command-line front end.
//!
//! Exit codes: 0 success, 1 no solution, 2 invalid input or an input too
//! large to enumerate, 3 verification failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use latlin::analyzer::{analyzed_structure, enumerate, export_dot, StructureKind};
use latlin::framework::{Algorithm, GlobalState};
use latlin::graph::Graph;
use latlin::mds::Mds;
use latlin::ramp::Ramp;
use latlin::report::{self, Report};
use latlin::scheduler::{self, default_max_steps, Daemon, DaemonKind, Outcome, SimError};
use latlin::smp::{Smp, SmpInstance};

#[derive(Parser)]
#[command(
    name = "latlin",
    version,
    about = "Run and verify lattice-linear distributed algorithms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one run and print its trace
    Run(RunArgs),
    /// Enumerate the state space and check its lattice structure
    Analyze(InputArgs),
    /// Run every structural and execution check
    Verify(InputArgs),
    /// Render the analyzed lattice as Graphviz DOT
    ExportDot(InputArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmKind {
    Mds,
    Smp,
    Ramp,
}

#[derive(Clone, Copy, ValueEnum)]
enum DaemonArg {
    CentralRandom,
    CentralMaxId,
    Synchronous,
    StaleAsync,
}

impl From<DaemonArg> for DaemonKind {
    fn from(d: DaemonArg) -> Self {
        match d {
            DaemonArg::CentralRandom => DaemonKind::CentralRandom,
            DaemonArg::CentralMaxId => DaemonKind::CentralMaxId,
            DaemonArg::Synchronous => DaemonKind::Synchronous,
            DaemonArg::StaleAsync => DaemonKind::StaleAsync,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    #[arg(long, value_enum)]
    algorithm: AlgorithmKind,

    /// Graph file (mds, ramp)
    #[arg(long)]
    graph: Option<PathBuf>,

    /// Preference file (smp)
    #[arg(long)]
    prefs: Option<PathBuf>,

    /// Comma-separated counter caps per node (ramp)
    #[arg(long)]
    caps: Option<String>,

    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Initial state in text form, or `random`
    #[arg(long, default_value = "random")]
    init: String,

    #[arg(long, value_enum, default_value = "central-max-id")]
    daemon: DaemonArg,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Staleness bound for the stale-async daemon
    #[arg(long, default_value_t = 0)]
    staleness: u32,

    /// Move limit; defaults to four times the move bound
    #[arg(long)]
    max_steps: Option<usize>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

enum Loaded {
    Mds(Mds),
    Smp(Smp),
    Ramp(Ramp),
}

impl Loaded {
    fn algorithm(&self) -> &dyn Algorithm {
        match self {
            Loaded::Mds(a) => a,
            Loaded::Smp(a) => a,
            Loaded::Ramp(a) => a,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_graph(path: Option<&PathBuf>) -> Result<(Graph, String), Failure> {
    let path = path.ok_or_else(|| Failure::input("--graph is required for this algorithm"))?;
    let graph = Graph::parse(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok((graph, path.display().to_string()))
}

fn parse_caps(text: &str) -> Result<Vec<u32>, Failure> {
    let caps: Vec<u32> = text
        .split(',')
        .map(|t| t.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::input(format!("--caps: {e}")))?;
    if caps.is_empty() || caps.contains(&0) {
        return Err(Failure::input("--caps: every cap must be at least 1"));
    }
    Ok(caps)
}

/// The algorithm and the input file name recorded in traces.
fn load(input: &InputArgs) -> Result<(Loaded, String), Failure> {
    match input.algorithm {
        AlgorithmKind::Mds => {
            let (graph, name) = load_graph(input.graph.as_ref())?;
            Ok((Loaded::Mds(Mds::new(graph)), name))
        }
        AlgorithmKind::Ramp => {
            let (graph, name) = load_graph(input.graph.as_ref())?;
            let caps = parse_caps(
                input
                    .caps
                    .as_deref()
                    .ok_or_else(|| Failure::input("--caps is required for ramp"))?,
            )?;
            Ok((Loaded::Ramp(Ramp::new(graph, &caps)), name))
        }
        AlgorithmKind::Smp => {
            let path = input
                .prefs
                .as_ref()
                .ok_or_else(|| Failure::input("--prefs is required for smp"))?;
            let instance =
                SmpInstance::parse(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            Ok((Loaded::Smp(Smp::new(instance)), path.display().to_string()))
        }
    }
}

/// Destinations for documents and for human-readable summaries.
struct Console<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Console<'_> {
    fn emit(&mut self, out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
        match out {
            Some(path) => fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
            None => self
                .stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::input(format!("stdout: {e}"))),
        }
    }

    fn note(&mut self, text: &str) {
        let _ = writeln!(self.stderr, "{text}");
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("documents serialize");
    text.push('\n');
    text
}

fn ensure_enumerable(alg: &dyn Algorithm) -> Result<(), Failure> {
    alg.domain()
        .enumerable_count("state space")
        .map(|_| ())
        .map_err(|e| Failure::input(e.to_string()))
}

fn cmd_run(con: &mut Console<'_>, args: &RunArgs) -> Result<u8, Failure> {
    let (loaded, name) = load(&args.input)?;
    let alg = loaded.algorithm();
    let init: GlobalState = if args.init == "random" {
        scheduler::seeded_initial_state(alg.domain(), args.seed)
    } else {
        alg.parse_state(&args.init)
            .map_err(|e| Failure::input(format!("--init: {e}")))?
    };
    let daemon = Daemon {
        kind: args.daemon.into(),
        seed: args.seed,
        staleness: args.staleness,
    };
    let max_steps = args.max_steps.unwrap_or_else(|| default_max_steps(alg));
    match scheduler::run(alg, &init, daemon, max_steps) {
        Ok(trace) => {
            con.emit(args.input.out.as_ref(), &to_json(&trace.to_document(alg, &name)))?;
            match trace.outcome {
                Outcome::NoSolution { node } => {
                    con.note(&format!(
                        "no solution: node {node} has no move left after {} moves",
                        trace.move_count()
                    ));
                    Ok(1)
                }
                Outcome::Converged if !alg.is_optimal(&trace.final_state) => {
                    con.note(&format!(
                        "terminated in a non-optimal state after {} moves",
                        trace.move_count()
                    ));
                    Ok(3)
                }
                Outcome::Converged => {
                    con.note(&format!("converged in {} moves", trace.move_count()));
                    Ok(0)
                }
            }
        }
        Err(SimError::BoundExceeded { limit, trace }) => {
            let mut doc = trace.to_document(alg, &name);
            doc.outcome = "BoundExceeded".into();
            con.emit(args.input.out.as_ref(), &to_json(&doc))?;
            con.note(&format!("no convergence within {limit} moves"));
            Ok(3)
        }
        Err(SimError::InvalidInit(e)) => Err(Failure::input(format!("--init: {e}"))),
        Err(SimError::Capacity(e)) => Err(Failure::input(e.to_string())),
        Err(e) => Err(Failure {
            code: 3,
            message: e.to_string(),
        }),
    }
}

fn finish_report(con: &mut Console<'_>, report: &Report, out: Option<&PathBuf>) -> Result<u8, Failure> {
    con.emit(out, &to_json(report))?;
    let failures = report.failures();
    con.note(&format!(
        "{}: {} states, {} components, {} of {} checks failed",
        report.algorithm,
        report.stats.states,
        report.stats.components,
        failures.len(),
        report.checks.len()
    ));
    for f in &failures {
        con.note(&format!(
            "  FAIL {}: {}",
            f.name,
            f.counterexample.as_deref().unwrap_or("")
        ));
    }
    Ok(if failures.is_empty() { 0 } else { 3 })
}

fn cmd_analyze(con: &mut Console<'_>, input: &InputArgs) -> Result<u8, Failure> {
    let (loaded, _) = load(input)?;
    ensure_enumerable(loaded.algorithm())?;
    let report = report::analyze(loaded.algorithm()).map_err(|e| Failure::input(e.to_string()))?;
    finish_report(con, &report, input.out.as_ref())
}

fn cmd_verify(con: &mut Console<'_>, input: &InputArgs) -> Result<u8, Failure> {
    let (loaded, _) = load(input)?;
    ensure_enumerable(loaded.algorithm())?;
    let report = match &loaded {
        Loaded::Mds(a) => report::verify_mds(a),
        Loaded::Smp(a) => report::verify_smp(a),
        Loaded::Ramp(a) => report::verify_ramp(a),
    }
    .map_err(|e| Failure::input(e.to_string()))?;
    finish_report(con, &report, input.out.as_ref())
}

fn cmd_export_dot(con: &mut Console<'_>, input: &InputArgs) -> Result<u8, Failure> {
    let (loaded, _) = load(input)?;
    let alg = loaded.algorithm();
    ensure_enumerable(alg)?;
    let capacity = |e: latlin::framework::CapacityError| Failure::input(e.to_string());
    let structure = analyzed_structure(alg).map_err(capacity)?;
    let overlay = match structure.kind() {
        StructureKind::ProductOrder => Some(enumerate(alg).map_err(capacity)?),
        StructureKind::Transitions => None,
    };
    con.emit(input.out.as_ref(), &export_dot(alg, &structure, overlay.as_ref()))?;
    con.note(&format!("{} components", structure.components().len()));
    Ok(0)
}

/// Parses `argv` and runs the command, returning the process exit code.
pub fn execute<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = write!(stderr, "{}", e.render());
            return 2;
        }
        Err(e) => {
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
    };
    let mut con = Console { stdout, stderr };
    let result = match &cli.command {
        Command::Run(args) => cmd_run(&mut con, args),
        Command::Analyze(input) => cmd_analyze(&mut con, input),
        Command::Verify(input) => cmd_verify(&mut con, input),
        Command::ExportDot(input) => cmd_export_dot(&mut con, input),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            con.note(&format!("error: {}", f.message));
            f.code
        }
    }
}
