//! Aggregated analysis and verification reports.
//!
//! [`analyze`] runs the structural checks of [`crate::analyzer`] and
//! summarizes every component. The `verify_*` functions add the execution
//! checks for one shipped algorithm: exhaustive schedules, every daemon from
//! every state, locality, and the algorithm-specific invariants. Check
//! failures are report content; only an oversized state space is an error.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analyzer::{
    analyzed_structure, check_transitions_within, enumerate, verify_bounds, verify_lattice, verify_semantic_forbidden,
    Check, StructureKind, TransitionSystem,
};
use crate::framework::{forbidden_nodes, state_less_than, Algorithm, CapacityError, GlobalState, StateOrder};
use crate::graph::NodeId;
use crate::mds::{self, Mds};
use crate::ramp::Ramp;
use crate::scheduler::{run, Daemon, DaemonKind, ExecutionTrace, Outcome, ScheduleExplorer, SimError};
use crate::smp::{Smp, SmpInstance};

/// Staleness bounds exercised beyond the `B = 0` baseline.
pub const STALENESS_PROBES: [u32; 3] = [1, 2, 4];

/// Largest number of initial states run under every daemon; larger spaces
/// are sampled at a fixed stride.
pub const DAEMON_STATE_CAP: usize = 1 << 14;

const ORDER_SAMPLE: usize = 48;
const DETERMINISM_SAMPLE: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub states: usize,
    pub edges: usize,
    pub components: usize,
    pub longest_path: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentSummary {
    pub index: usize,
    pub size: usize,
    pub supremum: Option<String>,
    pub infimum: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Observation {
    pub name: String,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub algorithm: String,
    pub checks: Vec<Check>,
    pub stats: Stats,
    pub components: Vec<ComponentSummary>,
    pub observations: Vec<Observation>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn observation(&self, name: &str) -> Option<&Value> {
        self.observations.iter().find(|o| o.name == name).map(|o| &o.detail)
    }

    fn push(&mut self, name: &str, failure: Option<String>) {
        self.checks.push(Check::new(name, failure));
    }

    fn observe(&mut self, name: &str, detail: Value) {
        self.observations.push(Observation {
            name: name.to_string(),
            detail,
        });
    }
}

/// Everything the execution checks share: the enumerated states and both
/// structures.
struct Context<'a> {
    alg: &'a dyn Algorithm,
    structure: TransitionSystem,
    skeleton: Option<TransitionSystem>,
    states: Vec<GlobalState>,
}

impl<'a> Context<'a> {
    fn new(alg: &'a dyn Algorithm) -> Result<Self, CapacityError> {
        let structure = analyzed_structure(alg)?;
        let skeleton = match structure.kind() {
            StructureKind::Transitions => None,
            StructureKind::ProductOrder => Some(enumerate(alg)?),
        };
        let states = (0..structure.state_count()).map(|i| structure.state(i)).collect();
        Ok(Context {
            alg,
            structure,
            skeleton,
            states,
        })
    }

    fn skeleton(&self) -> &TransitionSystem {
        self.skeleton.as_ref().unwrap_or(&self.structure)
    }

    fn fmt(&self, s: &GlobalState) -> String {
        format!("({})", self.alg.format_state(s))
    }

    /// Initial states for daemon runs: all of them, or an even stride.
    fn daemon_starts(&self) -> Vec<usize> {
        let n = self.states.len();
        let stride = n.div_ceil(DAEMON_STATE_CAP).max(1);
        (0..n).step_by(stride).collect()
    }
}

/// First failure among per-item results, prefixed with the failure count.
fn first_failure(results: Vec<Option<String>>) -> Option<String> {
    let count = results.iter().filter(|r| r.is_some()).count();
    let first = results.into_iter().flatten().next()?;
    Some(if count > 1 {
        format!("{first} (and {} more)", count - 1)
    } else {
        first
    })
}

/// Structural report for the algorithm's analyzed lattice.
pub fn analyze(alg: &dyn Algorithm) -> Result<Report, CapacityError> {
    let ctx = Context::new(alg)?;
    analyze_context(&ctx)
}

fn analyze_context(ctx: &Context<'_>) -> Result<Report, CapacityError> {
    let alg = ctx.alg;
    let ts = &ctx.structure;
    let bounds = verify_bounds(alg, ctx.skeleton());
    let mut report = Report {
        algorithm: alg.name().to_string(),
        checks: Vec::new(),
        stats: Stats {
            states: ts.state_count(),
            edges: ts.edges().len(),
            components: ts.components().len(),
            longest_path: (bounds.longest_path != usize::MAX).then_some(bounds.longest_path),
        },
        components: ts
            .components()
            .iter()
            .enumerate()
            .map(|(index, c)| ComponentSummary {
                index,
                size: c.states.len(),
                supremum: c.supremum().map(|s| alg.format_state(&ts.state(s))),
                infimum: c.infimum().map(|s| alg.format_state(&ts.state(s))),
            })
            .collect(),
        observations: Vec::new(),
    };

    let mut seen = vec![0usize; ts.state_count()];
    for c in ts.components() {
        for &s in &c.states {
            seen[s] += 1;
        }
    }
    let partition = seen
        .iter()
        .position(|&k| k != 1)
        .map(|s| format!("{} belongs to {} components", ctx.fmt(&ctx.states[s]), seen[s]));
    report.push("partition", partition);

    let lattices = (0..ts.components().len())
        .into_par_iter()
        .map(|c| verify_lattice(alg, ts, c))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(first) = lattices.first() {
        for (k, check) in first.checks.iter().enumerate() {
            let failures: Vec<Option<String>> = lattices
                .iter()
                .map(|l| {
                    let c = &l.checks[k];
                    (!c.pass).then(|| {
                        format!(
                            "component {}: {}",
                            l.component,
                            c.counterexample.clone().unwrap_or_default()
                        )
                    })
                })
                .collect();
            report.push(&check.name, first_failure(failures));
        }
    }

    if let Some(skeleton) = &ctx.skeleton {
        report.push_check(check_transitions_within(alg, ts, skeleton));
        let domain = ts.domain();
        let total = ts.state_count();
        let expected: usize = (0..domain.coordinates())
            .map(|c| {
                let size = domain.var_of_coordinate(c).size() as usize;
                total / size * (size - 1)
            })
            .sum();
        let covering =
            (ts.edges().len() != expected).then(|| format!("{} covering pairs, expected {expected}", ts.edges().len()));
        report.push("covering_pair_count", covering);
        report.observe(
            "transition_edges",
            json!({ "edges": skeleton.edges().len(), "exhausted": skeleton.exhausted().len() }),
        );
    }

    let bound_failure = (!bounds.pass).then(|| {
        format!(
            "longest execution {} exceeds {}: {}",
            bounds.longest_path,
            bounds.bound,
            bounds.witness.join(" -> ")
        )
    });
    report.push("move_bound", bound_failure);
    report.observe(
        "longest_execution",
        json!({ "moves": bounds.longest_path, "bound": bounds.bound, "path": bounds.witness }),
    );

    let semantic = verify_semantic_forbidden(alg, ts)?;
    let empty = first_failure(
        semantic
            .empty_syntactic
            .iter()
            .map(|s| Some(format!("{s} violates the predicate with no forbidden node")))
            .collect(),
    );
    report.push("forbidden_nonempty", empty);
    report.observe(
        "semantic_forbidden",
        serde_json::to_value(&semantic).expect("plain data"),
    );
    Ok(report)
}

impl Report {
    fn push_check(&mut self, check: Check) {
        self.checks.push(check);
    }
}

fn k_hop_check(alg: &dyn Algorithm) -> Option<String> {
    let g = alg.graph();
    for i in g.nodes() {
        let adjacency = g.adjacency(i).expect("node in range");
        if g.k_hop(i, 1).expect("node in range") != adjacency {
            return Some(format!("node {i}: 1-hop set differs from adjacency"));
        }
        let mut previous = adjacency;
        for radius in 1..=3 {
            let ball = g.k_hop(i, radius).expect("node in range");
            if ball.contains(&i) {
                return Some(format!("node {i} lies in its own {radius}-hop set"));
            }
            if !previous.is_subset(&ball) {
                return Some(format!("node {i}: {radius}-hop set shrinks"));
            }
            previous = ball;
        }
    }
    None
}

/// Irreflexivity and antisymmetry on pairs, transitivity on triples, over
/// an evenly spaced sample of states.
fn order_check(ctx: &Context<'_>) -> Option<String> {
    let stride = ctx.states.len().div_ceil(ORDER_SAMPLE).max(1);
    let sample: Vec<&GlobalState> = ctx.states.iter().step_by(stride).collect();
    let order = StateOrder::ascending(ctx.structure.domain().coordinates());
    let less = |a: &GlobalState, b: &GlobalState| state_less_than(a, b, &order).expect("same domain");
    for &a in &sample {
        if less(a, a) {
            return Some(format!("{} < itself", ctx.fmt(a)));
        }
        for &b in &sample {
            if less(a, b) && less(b, a) {
                return Some(format!("{} and {} are mutually less", ctx.fmt(a), ctx.fmt(b)));
            }
            if !less(a, b) {
                continue;
            }
            for &c in &sample {
                if less(b, c) && !less(a, c) {
                    return Some(format!(
                        "{} < {} < {} without transitivity",
                        ctx.fmt(a),
                        ctx.fmt(b),
                        ctx.fmt(c)
                    ));
                }
            }
        }
    }
    None
}

/// Changing any node outside `i`'s read ball leaves `i`'s guard unchanged.
fn locality_check(ctx: &Context<'_>) -> Option<String> {
    let alg = ctx.alg;
    let g = alg.graph();
    let domain = alg.domain();
    let outside: Vec<Vec<NodeId>> = g
        .nodes()
        .map(|i| {
            let ball = g.k_hop(i, alg.read_radius()).expect("node in range");
            g.nodes().filter(|j| *j != i && !ball.contains(j)).collect()
        })
        .collect();
    let results: Vec<Option<String>> = ctx
        .states
        .par_iter()
        .map(|s| {
            for i in g.nodes() {
                let before = alg.is_forbidden(s, i);
                for &j in &outside[i.index()] {
                    for (var, range) in domain.vars().iter().enumerate() {
                        for v in range.lo..=range.hi {
                            let mut local = s.local(j).to_vec();
                            if local[var] == v {
                                continue;
                            }
                            local[var] = v;
                            let changed = s.with_local(j, &local);
                            if alg.is_forbidden(&changed, i) != before {
                                return Some(format!(
                                    "node {i} at {} changes when node {j} is set to {}",
                                    ctx.fmt(s),
                                    alg.format_local(&local)
                                ));
                            }
                        }
                    }
                }
            }
            None
        })
        .collect();
    first_failure(results)
}

/// Flipping every forbidden node at once, like a synchronous round.
fn synchronous_successor(alg: &dyn Algorithm, s: &GlobalState) -> Option<GlobalState> {
    let forbidden = forbidden_nodes(alg, s);
    if forbidden.is_empty() {
        return None;
    }
    let mut next = s.clone();
    for i in forbidden {
        next.set_local(i, alg.next_local(s, i).ok()?.values());
    }
    Some(next)
}

fn rank_checks(ctx: &Context<'_>, report: &mut Report) {
    let alg = ctx.alg;
    let skeleton = ctx.skeleton();
    let single = first_failure(
        skeleton
            .edges()
            .par_iter()
            .map(|e| {
                let (a, b) = (&ctx.states[e.from], &ctx.states[e.to]);
                let (ra, rb) = (alg.rank(a), alg.rank(b));
                (rb >= ra).then(|| format!("node {} at {}: rank {ra} -> {rb}", e.node, ctx.fmt(a)))
            })
            .collect(),
    );
    report.push("rank_decreasing_moves", single);
    let synchronous = first_failure(
        ctx.states
            .par_iter()
            .map(|s| {
                let next = synchronous_successor(alg, s)?;
                let (ra, rb) = (alg.rank(s), alg.rank(&next));
                (rb >= ra).then(|| format!("{} -> {}: rank {ra} -> {rb}", ctx.fmt(s), ctx.fmt(&next)))
            })
            .collect(),
    );
    report.push("rank_decreasing_synchronous", synchronous);
}

fn rank_zero_check(ctx: &Context<'_>) -> Option<String> {
    first_failure(
        ctx.states
            .par_iter()
            .map(|s| {
                let zero = ctx.alg.rank(s) == 0;
                let terminal = forbidden_nodes(ctx.alg, s).is_empty();
                (zero != terminal).then(|| format!("{}: rank zero {zero}, terminal {terminal}", ctx.fmt(s)))
            })
            .collect(),
    )
}

/// Result of every central-daemon schedule from every state.
struct Schedules {
    /// Per state: all terminals and the longest move count.
    per_state: Vec<(BTreeSet<GlobalState>, usize)>,
    revisit: Option<String>,
}

fn schedule_checks(ctx: &Context<'_>, report: &mut Report) -> Option<Schedules> {
    let alg = ctx.alg;
    let bound = alg.domain().move_bound() as usize;
    let mut explorer = ScheduleExplorer::new(alg, 4 * bound + 1);
    let mut per_state = Vec::with_capacity(ctx.states.len());
    let mut revisit = None;
    for s in &ctx.states {
        match explorer.explore(s) {
            Ok(summary) => {
                if revisit.is_none() {
                    if let Some(w) = &summary.revisit {
                        let nodes: Vec<String> = w.nodes.iter().map(|n| n.to_string()).collect();
                        revisit = Some(format!(
                            "from {} the schedule {} moves node {} twice",
                            ctx.fmt(&w.state),
                            nodes.join(","),
                            w.nodes[0]
                        ));
                    }
                }
                per_state.push((
                    summary.terminals.keys().map(|t| t.state.clone()).collect(),
                    summary.max_moves,
                ));
            }
            Err(SimError::Cycle { state }) => {
                report.push(
                    "all_schedules_terminate",
                    Some(format!("some schedule cycles through {}", ctx.fmt(&state))),
                );
                return None;
            }
            Err(e) => {
                report.push("all_schedules_terminate", Some(format!("from {}: {e}", ctx.fmt(s))));
                return None;
            }
        }
    }
    report.push("all_schedules_terminate", None);
    let (worst, max_moves) = per_state
        .iter()
        .enumerate()
        .map(|(i, (_, m))| (i, *m))
        .max_by_key(|&(i, m)| (m, std::cmp::Reverse(i)))
        .unwrap_or((0, 0));
    let over = (max_moves > bound).then(|| {
        format!(
            "{} admits a schedule of {max_moves} moves, bound {bound}",
            ctx.fmt(&ctx.states[worst])
        )
    });
    report.push("schedule_move_bound", over);
    report.observe("schedules", json!({ "max_moves": max_moves, "bound": bound }));
    Some(Schedules { per_state, revisit })
}

#[derive(Default, Serialize)]
struct Tally {
    runs: usize,
    converged: usize,
    optimal_finals: usize,
    no_solution: usize,
    errors: usize,
    repeated_movers: usize,
    over_bound: usize,
    max_moves: usize,
    problem_runs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_problem: Option<String>,
}

struct DaemonRun {
    start: usize,
    result: Result<ExecutionTrace, SimError>,
}

fn run_daemon(ctx: &Context<'_>, starts: &[usize], daemon_for: impl Fn(u64) -> Daemon + Sync) -> Vec<DaemonRun> {
    let max = 4 * ctx.alg.domain().move_bound() as usize;
    starts
        .par_iter()
        .map(|&start| DaemonRun {
            start,
            result: run(ctx.alg, &ctx.states[start], daemon_for(start as u64), max),
        })
        .collect()
}

/// Counts run outcomes. `no_revisit` marks a node moving twice as a
/// problem.
fn tally(ctx: &Context<'_>, runs: &[DaemonRun], no_revisit: bool) -> Tally {
    let bound = ctx.alg.domain().move_bound() as usize;
    let mut t = Tally::default();
    for r in runs {
        t.runs += 1;
        let start = ctx.fmt(&ctx.states[r.start]);
        let problem = match &r.result {
            Err(e) => {
                t.errors += 1;
                Some(format!("from {start}: {e}"))
            }
            Ok(trace) => {
                t.max_moves = t.max_moves.max(trace.move_count());
                let mut problem = None;
                match trace.outcome {
                    Outcome::Converged => {
                        t.converged += 1;
                        if ctx.alg.is_optimal(&trace.final_state) {
                            t.optimal_finals += 1;
                        } else {
                            problem = Some(format!(
                                "from {start}: final {} is not optimal",
                                ctx.fmt(&trace.final_state)
                            ));
                        }
                    }
                    Outcome::NoSolution { .. } => t.no_solution += 1,
                }
                if trace.move_count() > bound {
                    t.over_bound += 1;
                    problem.get_or_insert(format!("from {start}: {} moves, bound {bound}", trace.move_count()));
                }
                if no_revisit {
                    if let Some(node) = trace.repeated_mover() {
                        t.repeated_movers += 1;
                        problem.get_or_insert(format!("from {start}: node {node} moves twice"));
                    }
                }
                problem
            }
        };
        if problem.is_some() {
            t.problem_runs += 1;
        }
        if t.first_problem.is_none() {
            t.first_problem = problem;
        }
    }
    t
}

/// Every daemon from every (sampled) state. Baseline daemons are checks;
/// larger staleness bounds are observations.
fn daemon_checks(ctx: &Context<'_>, report: &mut Report, no_revisit: bool) {
    let starts = ctx.daemon_starts();
    report.observe(
        "daemon_starts",
        json!({ "runs_per_daemon": starts.len(), "states": ctx.states.len() }),
    );
    let mut baseline = Vec::new();
    for kind in DaemonKind::ALL {
        let runs = run_daemon(ctx, &starts, |seed| Daemon::new(kind, seed));
        let t = tally(ctx, &runs, no_revisit);
        let name = format!("daemon_{}", kind.as_str().replace('-', "_"));
        let failure = t
            .first_problem
            .clone()
            .map(|p| format!("{} of {} runs with problems; first {p}", t.problem_runs, t.runs));
        report.push(&name, failure);
        report.observe(&name, serde_json::to_value(&t).expect("plain data"));
        baseline.push((kind, runs));
    }

    let random = &baseline
        .iter()
        .find(|(k, _)| *k == DaemonKind::CentralRandom)
        .expect("listed")
        .1;
    let stale = run_daemon(ctx, &starts, |seed| Daemon::stale(seed, 0));
    let mismatch = random.iter().zip(&stale).find_map(|(a, b)| {
        let same = match (&a.result, &b.result) {
            (Ok(x), Ok(y)) => x.moves == y.moves && x.final_state == y.final_state && x.outcome == y.outcome,
            (Err(x), Err(y)) => x.to_string() == y.to_string(),
            _ => false,
        };
        (!same).then(|| format!("from {}", ctx.fmt(&ctx.states[a.start])))
    });
    report.push("stale_zero_matches_central_random", mismatch);

    for b in STALENESS_PROBES {
        let runs = run_daemon(ctx, &starts, |seed| Daemon::stale(seed, b));
        let t = tally(ctx, &runs, no_revisit);
        report.observe(
            &format!("daemon_stale_async_b{b}"),
            serde_json::to_value(&t).expect("plain data"),
        );
    }

    let probe: Vec<usize> = starts
        .iter()
        .copied()
        .step_by(starts.len().div_ceil(DETERMINISM_SAMPLE).max(1))
        .collect();
    let mut nondeterministic = None;
    for kind in DaemonKind::ALL {
        let daemon = |seed| Daemon {
            staleness: 2,
            ..Daemon::new(kind, seed)
        };
        let first = run_daemon(ctx, &probe, daemon);
        let second = run_daemon(ctx, &probe, daemon);
        for (a, b) in first.iter().zip(&second) {
            let same = match (&a.result, &b.result) {
                (Ok(x), Ok(y)) => x == y,
                (Err(x), Err(y)) => x.to_string() == y.to_string(),
                _ => false,
            };
            if !same && nondeterministic.is_none() {
                nondeterministic = Some(format!("{} from {}", kind.as_str(), ctx.fmt(&ctx.states[a.start])));
            }
        }
    }
    report.push("determinism", nondeterministic);
}

/// Checks shared by every algorithm.
fn common_checks(ctx: &Context<'_>, report: &mut Report) {
    report.push("k_hop_properties", k_hop_check(ctx.alg));
    report.push("strict_partial_order", order_check(ctx));
    let terminal = first_failure(
        ctx.states
            .par_iter()
            .map(|s| {
                let terminal = forbidden_nodes(ctx.alg, s).is_empty();
                let optimal = ctx.alg.is_optimal(s);
                (terminal != optimal).then(|| format!("{}: terminal {terminal}, optimal {optimal}", ctx.fmt(s)))
            })
            .collect(),
    );
    report.push("terminal_iff_optimal", terminal);
    report.push("locality", locality_check(ctx));
    rank_checks(ctx, report);
}

pub fn verify_mds(alg: &Mds) -> Result<Report, CapacityError> {
    let ctx = Context::new(alg)?;
    let mut report = analyze_context(&ctx)?;
    common_checks(&ctx, &mut report);
    let g = alg.graph();

    let guard = first_failure(
        ctx.states
            .par_iter()
            .map(|s| {
                let forbidden = forbidden_nodes(alg, s);
                for &i in &forbidden {
                    if !mds::unsatisfied(g, s, i) {
                        return Some(format!("node {i} at {} is forbidden but satisfied", ctx.fmt(s)));
                    }
                    if let Some(j) = alg.ball(i).iter().find(|j| forbidden.contains(j)) {
                        return Some(format!("nodes {i} and {j} are both forbidden at {}", ctx.fmt(s)));
                    }
                }
                None
            })
            .collect(),
    );
    report.push("forbidden_unique_in_ball", guard);
    report.push("rank_zero_iff_terminal", rank_zero_check(&ctx));

    let ts = &ctx.structure;
    let sinks = first_failure(
        ts.components()
            .iter()
            .flat_map(|c| c.sinks.iter())
            .map(|&s| {
                (!mds::is_minimal_dominating(g, &ctx.states[s]))
                    .then(|| format!("sink {} is not a minimal dominating set", ctx.fmt(&ctx.states[s])))
            })
            .collect(),
    );
    report.push("suprema_minimal_dominating", sinks);

    if let Some(schedules) = schedule_checks(&ctx, &mut report) {
        report.push("no_revisit", schedules.revisit.clone());
        let split = first_failure(
            ts.components()
                .iter()
                .map(|c| {
                    let mut finals = BTreeSet::new();
                    for &s in &c.states {
                        finals.extend(schedules.per_state[s].0.iter().cloned());
                    }
                    (finals.len() != 1).then(|| {
                        let shown: Vec<String> = finals.iter().take(4).map(|f| ctx.fmt(f)).collect();
                        format!(
                            "a component of {} states ends in {} states: {}",
                            c.states.len(),
                            finals.len(),
                            shown.join(" ")
                        )
                    })
                })
                .collect(),
        );
        report.push("component_final_unique", split);
    }
    daemon_checks(&ctx, &mut report, true);
    Ok(report)
}

fn smp_start_note(alg: &Smp, text: &str) -> Value {
    let state = alg.parse_state(text).expect("valid state");
    let forbidden: Vec<usize> = forbidden_nodes(alg, &state).iter().map(|n| n.0).collect();
    let trace = run(
        alg,
        &state,
        Daemon::new(DaemonKind::CentralMaxId, 0),
        4 * alg.domain().move_bound() as usize,
    );
    match trace {
        Ok(t) => json!({
            "start": text,
            "forbidden": forbidden,
            "outcome": t.outcome.as_str(),
            "exhausted_node": match t.outcome { Outcome::NoSolution { node } => Some(node.0), _ => None },
            "final": alg.format_state(&t.final_state),
            "moves": t.move_count(),
        }),
        Err(e) => json!({ "start": text, "error": e.to_string() }),
    }
}

pub fn verify_smp(alg: &Smp) -> Result<Report, CapacityError> {
    let ctx = Context::new(alg)?;
    let mut report = analyze_context(&ctx)?;
    common_checks(&ctx, &mut report);
    schedule_checks(&ctx, &mut report);

    let inst = alg.instance();
    let gs = inst.gale_shapley();
    let minimum = alg.domain().minimum();
    let agreement = match run(
        alg,
        &minimum,
        Daemon::new(DaemonKind::CentralMaxId, 0),
        4 * alg.domain().move_bound() as usize,
    ) {
        Err(e) => Some(format!("run from the first choices failed: {e}")),
        Ok(t) => match (t.outcome, inst.matching(&t.final_state)) {
            (Outcome::Converged, Some(m)) if m == gs && inst.is_stable(&m) => None,
            (Outcome::Converged, m) => Some(format!(
                "final {} gives {m:?}, expected {gs:?}",
                ctx.fmt(&t.final_state)
            )),
            (Outcome::NoSolution { node }, _) => Some(format!("man {node} exhausted his list")),
        },
    };
    report.push("gale_shapley_agreement", agreement);
    daemon_checks(&ctx, &mut report, false);

    if *inst == SmpInstance::three_by_three() {
        for (name, start) in [("start_1_1_1", "1,1,1"), ("start_3_1_2", "3,1,2")] {
            report.observe(name, smp_start_note(alg, start));
        }
        let mut note = smp_start_note(alg, "1,2,3");
        note["flag"] = json!(
            "expected to terminate at (1,2,3); under the implemented rules men 1 and 3 both target woman 2, \
             she prefers man 1, so man 3 is forbidden with no choice left"
        );
        report.observe("start_1_2_3_discrepancy", note);
    }
    Ok(report)
}

pub fn verify_ramp(alg: &Ramp) -> Result<Report, CapacityError> {
    let ctx = Context::new(alg)?;
    let mut report = analyze_context(&ctx)?;
    common_checks(&ctx, &mut report);
    report.push("rank_zero_iff_terminal", rank_zero_check(&ctx));
    schedule_checks(&ctx, &mut report);

    let bound = alg.domain().move_bound() as usize;
    let tight = match run(
        alg,
        &alg.domain().minimum(),
        Daemon::new(DaemonKind::CentralMaxId, 0),
        4 * bound,
    ) {
        Ok(t) if t.move_count() == bound && t.outcome == Outcome::Converged => None,
        Ok(t) => Some(format!("{} moves from the minimum, bound {bound}", t.move_count())),
        Err(e) => Some(e.to_string()),
    };
    report.push("bound_tight_from_minimum", tight);
    daemon_checks(&ctx, &mut report, false);
    Ok(report)
}
