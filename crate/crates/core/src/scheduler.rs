//! Execution engine: drives an [`Algorithm`] under a scheduling daemon and
//! records every move.
//!
//! Daemons:
//! - `central-random` moves one forbidden node per step, chosen uniformly by seed.
//! - `central-max-id` moves the forbidden node with the largest ID.
//! - `synchronous` moves every forbidden node at once. At commit time the
//!   round must be serializable: some order of its single moves, each node
//!   still forbidden and writing the same value, reproduces it. A round with
//!   no such order is reported as a conflict rather than resolved.
//! - `stale-async` evaluates each node's guard against its own cached copy of
//!   the nodes it reads. A cached entry may lag its owner by at most `B` moves:
//!   before every step each lagging entry is refreshed with probability ½, and
//!   unconditionally once its lag exceeds `B`. With `B = 0` no coin is drawn
//!   and the daemon reproduces `central-random` exactly.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::framework::{
    forbidden_nodes, Algorithm, CapacityError, Domain, GlobalState, LocalState, StateError, ENUMERATION_CAP,
};
use crate::graph::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DaemonKind {
    CentralRandom,
    CentralMaxId,
    Synchronous,
    StaleAsync,
}

impl DaemonKind {
    pub const ALL: [DaemonKind; 4] = [
        DaemonKind::CentralRandom,
        DaemonKind::CentralMaxId,
        DaemonKind::Synchronous,
        DaemonKind::StaleAsync,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DaemonKind::CentralRandom => "central-random",
            DaemonKind::CentralMaxId => "central-max-id",
            DaemonKind::Synchronous => "synchronous",
            DaemonKind::StaleAsync => "stale-async",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Daemon {
    pub kind: DaemonKind,
    pub seed: u64,
    /// Staleness bound `B`; only read by `stale-async`.
    pub staleness: u32,
}

impl Daemon {
    pub fn new(kind: DaemonKind, seed: u64) -> Self {
        Daemon {
            kind,
            seed,
            staleness: 0,
        }
    }

    pub fn stale(seed: u64, staleness: u32) -> Self {
        Daemon {
            kind: DaemonKind::StaleAsync,
            seed,
            staleness,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    /// 1-based scheduler step. Moves of one synchronous round share a step.
    pub step: usize,
    pub node: NodeId,
    pub from: LocalState,
    pub to: LocalState,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Converged,
    /// `node` was forbidden with no move left in its domain.
    NoSolution {
        node: NodeId,
    },
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Converged => "Converged",
            Outcome::NoSolution { .. } => "NoSolution",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub initial: GlobalState,
    pub moves: Vec<Move>,
    pub final_state: GlobalState,
    pub outcome: Outcome,
    pub daemon: Daemon,
}

impl ExecutionTrace {
    pub fn move_count(&self) -> usize {
        self.moves.len()
    }

    /// Re-applies the moves to `initial`, checking each recorded `from`.
    pub fn replay(&self) -> Result<GlobalState, String> {
        let mut state = self.initial.clone();
        for mv in &self.moves {
            if state.local(mv.node) != mv.from.values() {
                return Err(format!(
                    "step {}: node {} does not hold the recorded value",
                    mv.step, mv.node
                ));
            }
            state.set_local(mv.node, mv.to.values());
        }
        Ok(state)
    }

    /// Whether any node appears in more than one move.
    pub fn repeated_mover(&self) -> Option<NodeId> {
        let mut seen = HashSet::new();
        self.moves.iter().find(|m| !seen.insert(m.node)).map(|m| m.node)
    }

    pub fn to_document(&self, alg: &dyn Algorithm, input_file: &str) -> TraceDocument {
        TraceDocument {
            algorithm: alg.name().to_string(),
            graph_file: input_file.to_string(),
            daemon: DaemonDocument {
                kind: self.daemon.kind.as_str().to_string(),
                seed: self.daemon.seed,
                staleness: self.daemon.staleness,
            },
            initial: alg.format_state(&self.initial),
            final_state: alg.format_state(&self.final_state),
            outcome: self.outcome.as_str().to_string(),
            moves: self
                .moves
                .iter()
                .map(|m| MoveDocument {
                    step: m.step,
                    node: m.node.0,
                    from: alg.format_local(m.from.values()),
                    to: alg.format_local(m.to.values()),
                })
                .collect(),
            move_count: self.moves.len(),
        }
    }
}

/// JSON form of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub algorithm: String,
    pub graph_file: String,
    pub daemon: DaemonDocument,
    pub initial: String,
    #[serde(rename = "final")]
    pub final_state: String,
    pub outcome: String,
    pub moves: Vec<MoveDocument>,
    pub move_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DaemonDocument {
    pub kind: String,
    pub seed: u64,
    pub staleness: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveDocument {
    pub step: usize,
    pub node: usize,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid initial state: {0}")]
    InvalidInit(#[from] StateError),
    #[error("run needed more than {limit} moves")]
    BoundExceeded { limit: usize, trace: Box<ExecutionTrace> },
    #[error("synchronous step {step}: node {node} {detail}")]
    Conflict { step: usize, node: NodeId, detail: String },
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error("transition cycle through a reachable state")]
    Cycle { state: GlobalState },
}

/// Uniform initial state drawn from `seed`, on a stream separate from the
/// daemon's choices.
pub fn seeded_initial_state(domain: &Domain, seed: u64) -> GlobalState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    domain.random_state(&mut rng)
}

/// `4 ×` the no-revisit move bound of the algorithm's domain.
pub fn default_max_steps(alg: &dyn Algorithm) -> usize {
    (4 * alg.domain().move_bound()) as usize
}

struct Runner<'a> {
    alg: &'a dyn Algorithm,
    daemon: Daemon,
    initial: GlobalState,
    state: GlobalState,
    moves: Vec<Move>,
    max_moves: usize,
}

impl Runner<'_> {
    fn finish(self, outcome: Outcome) -> ExecutionTrace {
        ExecutionTrace {
            initial: self.initial,
            moves: self.moves,
            final_state: self.state,
            outcome,
            daemon: self.daemon,
        }
    }

    fn exceeded(self) -> SimError {
        let limit = self.max_moves;
        SimError::BoundExceeded {
            limit,
            trace: Box::new(self.finish(Outcome::Converged)),
        }
    }

    fn record(&mut self, step: usize, node: NodeId, to: LocalState) {
        let from = self.state.local_state(node);
        self.state.set_local(node, to.values());
        self.moves.push(Move { step, node, from, to });
    }
}

/// Runs `alg` from `init` until no guard is enabled, an exhausted node ends
/// the run, or more than `max_steps` moves would be needed.
pub fn run(
    alg: &dyn Algorithm,
    init: &GlobalState,
    daemon: Daemon,
    max_steps: usize,
) -> Result<ExecutionTrace, SimError> {
    alg.domain().validate(init)?;
    let runner = Runner {
        alg,
        daemon,
        initial: init.clone(),
        state: init.clone(),
        moves: Vec::new(),
        max_moves: max_steps,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(daemon.seed);
    match daemon.kind {
        DaemonKind::CentralRandom | DaemonKind::CentralMaxId => run_central(runner, &mut rng),
        DaemonKind::Synchronous => run_synchronous(runner),
        DaemonKind::StaleAsync => run_stale(runner, &mut rng),
    }
}

fn run_central(mut r: Runner<'_>, rng: &mut ChaCha8Rng) -> Result<ExecutionTrace, SimError> {
    let mut step = 0;
    loop {
        let enabled: Vec<NodeId> = forbidden_nodes(r.alg, &r.state).into_iter().collect();
        if enabled.is_empty() {
            return Ok(r.finish(Outcome::Converged));
        }
        let node = match r.daemon.kind {
            DaemonKind::CentralMaxId => *enabled.last().expect("non-empty"),
            _ => enabled[rng.gen_range(0..enabled.len())],
        };
        let next = match r.alg.next_local(&r.state, node) {
            Ok(next) => next,
            Err(e) => return Ok(r.finish(Outcome::NoSolution { node: e.node })),
        };
        if r.moves.len() >= r.max_moves {
            return Err(r.exceeded());
        }
        step += 1;
        r.record(step, node, next);
    }
}

fn run_synchronous(mut r: Runner<'_>) -> Result<ExecutionTrace, SimError> {
    let mut round = 0;
    loop {
        let enabled: Vec<NodeId> = forbidden_nodes(r.alg, &r.state).into_iter().collect();
        if enabled.is_empty() {
            return Ok(r.finish(Outcome::Converged));
        }
        let mut targets = Vec::with_capacity(enabled.len());
        for &node in &enabled {
            match r.alg.next_local(&r.state, node) {
                Ok(next) => targets.push(next),
                Err(e) => return Ok(r.finish(Outcome::NoSolution { node: e.node })),
            }
        }
        if r.moves.len() + enabled.len() > r.max_moves {
            return Err(r.exceeded());
        }
        round += 1;
        if let Err(node) = serialization(r.alg, &r.state, &enabled, &targets) {
            return Err(SimError::Conflict {
                step: round,
                node,
                detail: "cannot be ordered after the other writes of the round".into(),
            });
        }
        for (node, target) in enabled.into_iter().zip(targets) {
            r.record(round, node, target);
        }
    }
}

/// Largest round searched over all commit orders; bigger rounds are only
/// tried in ID order.
const SERIALIZATION_SEARCH_CAP: usize = 16;

fn write_applies(alg: &dyn Algorithm, s: &GlobalState, node: NodeId, target: &LocalState) -> bool {
    alg.is_forbidden(s, node) && alg.next_local(s, node).ok().as_ref() == Some(target)
}

/// Finds an order in which the round's writes can be applied one at a time,
/// each node still enabled and choosing the same value. `Err` names the
/// lowest node that blocks every order tried.
fn serialization(
    alg: &dyn Algorithm,
    state: &GlobalState,
    nodes: &[NodeId],
    targets: &[LocalState],
) -> Result<Vec<NodeId>, NodeId> {
    let mut serial = state.clone();
    let mut blocked = None;
    for (&node, target) in nodes.iter().zip(targets) {
        if !write_applies(alg, &serial, node, target) {
            blocked = Some(node);
            break;
        }
        serial.set_local(node, target.values());
    }
    let Some(first_blocked) = blocked else {
        return Ok(nodes.to_vec());
    };
    if nodes.len() > SERIALIZATION_SEARCH_CAP {
        return Err(first_blocked);
    }

    let mut search = OrderSearch {
        alg,
        nodes,
        targets,
        full: (1u32 << nodes.len()) - 1,
        dead: HashSet::new(),
        order: Vec::with_capacity(nodes.len()),
    };
    if search.extend(state, 0) {
        Ok(search.order)
    } else {
        Err(first_blocked)
    }
}

/// Depth-first search over subsets of committed writes. A subset fixes the
/// intermediate state, so dead subsets are remembered and expanded once.
struct OrderSearch<'a> {
    alg: &'a dyn Algorithm,
    nodes: &'a [NodeId],
    targets: &'a [LocalState],
    full: u32,
    dead: HashSet<u32>,
    order: Vec<NodeId>,
}

impl OrderSearch<'_> {
    fn extend(&mut self, s: &GlobalState, done: u32) -> bool {
        if done == self.full {
            return true;
        }
        if self.dead.contains(&done) {
            return false;
        }
        for (k, (&node, target)) in self.nodes.iter().zip(self.targets).enumerate() {
            if done & (1 << k) == 0 && write_applies(self.alg, s, node, target) {
                self.order.push(node);
                if self.extend(&s.with_local(node, target.values()), done | (1 << k)) {
                    return true;
                }
                self.order.pop();
            }
        }
        self.dead.insert(done);
        false
    }
}

struct CacheEntry {
    owner: NodeId,
    value: LocalState,
    version: u64,
}

fn run_stale(mut r: Runner<'_>, rng: &mut ChaCha8Rng) -> Result<ExecutionTrace, SimError> {
    let graph = r.alg.graph();
    let radius = r.alg.read_radius();
    let bound = r.daemon.staleness as u64;
    let mut versions = vec![0u64; graph.node_count()];
    let mut caches: Vec<Vec<CacheEntry>> = graph
        .nodes()
        .map(|i| {
            graph
                .k_hop(i, radius)
                .expect("node in range")
                .into_iter()
                .map(|owner| CacheEntry {
                    owner,
                    value: r.state.local_state(owner),
                    version: 0,
                })
                .collect()
        })
        .collect();

    let mut step = 0;
    loop {
        step += 1;
        for entry in caches.iter_mut().flatten() {
            let current = versions[entry.owner.index()];
            let lag = current - entry.version;
            if lag == 0 {
                continue;
            }
            if lag > bound || rng.gen_bool(0.5) {
                entry.value = r.state.local_state(entry.owner);
                entry.version = current;
            }
        }

        let view = |state: &GlobalState, cache: &[CacheEntry]| {
            let mut v = state.clone();
            for entry in cache {
                v.set_local(entry.owner, entry.value.values());
            }
            v
        };
        let enabled: Vec<NodeId> = graph
            .nodes()
            .filter(|&i| r.alg.is_forbidden(&view(&r.state, &caches[i.index()]), i))
            .collect();

        if enabled.is_empty() {
            if forbidden_nodes(r.alg, &r.state).is_empty() {
                return Ok(r.finish(Outcome::Converged));
            }
            // Every view is stale enough to hide the remaining work: resync.
            for entry in caches.iter_mut().flatten() {
                entry.value = r.state.local_state(entry.owner);
                entry.version = versions[entry.owner.index()];
            }
            continue;
        }

        let node = enabled[rng.gen_range(0..enabled.len())];
        let seen = view(&r.state, &caches[node.index()]);
        let next = match r.alg.next_local(&seen, node) {
            Ok(next) => next,
            Err(e) => return Ok(r.finish(Outcome::NoSolution { node: e.node })),
        };
        if r.moves.len() >= r.max_moves {
            return Err(r.exceeded());
        }
        r.record(step, node, next);
        versions[node.index()] += 1;
    }
}

/// A state from which no further central-daemon move is possible.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Terminal {
    pub state: GlobalState,
    pub outcome: Outcome,
}

/// From `state`, the central daemon can make `nodes[0]` move first and
/// later move it again.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevisitWitness {
    pub state: GlobalState,
    pub nodes: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleSummary {
    /// Every reachable terminal with the longest move count that reaches it.
    pub terminals: BTreeMap<Terminal, usize>,
    pub max_moves: usize,
    pub revisit: Option<RevisitWitness>,
}

#[derive(Clone)]
struct Explored {
    longest: usize,
    terminals: BTreeMap<Terminal, usize>,
    movers: BTreeSet<NodeId>,
    successors: Vec<(NodeId, GlobalState)>,
    revisit: Option<RevisitWitness>,
}

/// Exhaustive exploration of every central-daemon choice sequence. Results
/// are memoized per state, so one explorer can serve many initial states.
pub struct ScheduleExplorer<'a> {
    alg: &'a dyn Algorithm,
    depth_cap: usize,
    memo: HashMap<GlobalState, Explored>,
}

impl<'a> ScheduleExplorer<'a> {
    pub fn new(alg: &'a dyn Algorithm, depth_cap: usize) -> Self {
        ScheduleExplorer {
            alg,
            depth_cap,
            memo: HashMap::new(),
        }
    }

    pub fn explore(&mut self, init: &GlobalState) -> Result<ScheduleSummary, SimError> {
        self.alg.domain().validate(init)?;
        let mut on_path = HashSet::new();
        self.visit(init, 0, &mut on_path)?;
        let info = &self.memo[init];
        Ok(ScheduleSummary {
            terminals: info.terminals.clone(),
            max_moves: info.longest,
            revisit: info.revisit.clone(),
        })
    }

    fn visit(&mut self, state: &GlobalState, depth: usize, on_path: &mut HashSet<GlobalState>) -> Result<(), SimError> {
        if self.memo.contains_key(state) {
            return Ok(());
        }
        if on_path.contains(state) {
            return Err(SimError::Cycle { state: state.clone() });
        }
        if depth > self.depth_cap {
            return Err(CapacityError {
                what: "schedule depth".into(),
                size: depth as u128,
                cap: self.depth_cap as u64,
            }
            .into());
        }
        if self.memo.len() as u64 >= ENUMERATION_CAP {
            return Err(CapacityError {
                what: "explored schedule states".into(),
                size: self.memo.len() as u128 + 1,
                cap: ENUMERATION_CAP,
            }
            .into());
        }

        let forbidden = forbidden_nodes(self.alg, state);
        let mut successors = Vec::new();
        let mut exhausted = None;
        for &node in &forbidden {
            match self.alg.next_local(state, node) {
                Ok(next) => successors.push((node, state.with_local(node, next.values()))),
                Err(e) => {
                    exhausted.get_or_insert(e.node);
                }
            }
        }

        on_path.insert(state.clone());
        for (_, next) in &successors {
            self.visit(next, depth + 1, on_path)?;
        }
        on_path.remove(state);

        let mut info = Explored {
            longest: 0,
            terminals: BTreeMap::new(),
            movers: BTreeSet::new(),
            successors: successors.clone(),
            revisit: None,
        };
        if forbidden.is_empty() {
            info.terminals.insert(
                Terminal {
                    state: state.clone(),
                    outcome: Outcome::Converged,
                },
                0,
            );
        }
        if let Some(node) = exhausted {
            info.terminals.insert(
                Terminal {
                    state: state.clone(),
                    outcome: Outcome::NoSolution { node },
                },
                0,
            );
        }
        for (node, next) in &successors {
            let child = &self.memo[next];
            info.longest = info.longest.max(child.longest + 1);
            for (t, &len) in &child.terminals {
                let slot = info.terminals.entry(t.clone()).or_insert(0);
                *slot = (*slot).max(len + 1);
            }
            info.movers.insert(*node);
            info.movers.extend(child.movers.iter().copied());
            if info.revisit.is_none() {
                if child.movers.contains(node) {
                    let mut nodes = vec![*node];
                    nodes.extend(self.path_to_move_of(next, *node));
                    info.revisit = Some(RevisitWitness {
                        state: state.clone(),
                        nodes,
                    });
                } else {
                    info.revisit = child.revisit.clone();
                }
            }
        }
        self.memo.insert(state.clone(), info);
        Ok(())
    }

    /// Node sequence from `state` that ends with a move of `target`.
    fn path_to_move_of(&self, state: &GlobalState, target: NodeId) -> Vec<NodeId> {
        let mut path = Vec::new();
        let mut current = state.clone();
        loop {
            let info = &self.memo[&current];
            let (node, next) = info
                .successors
                .iter()
                .find(|(n, s)| *n == target || self.memo[s].movers.contains(&target))
                .expect("target is reachable as a mover");
            path.push(*node);
            if *node == target {
                return path;
            }
            current = next.clone();
        }
    }
}

pub fn run_all_schedules(
    alg: &dyn Algorithm,
    init: &GlobalState,
    depth_cap: usize,
) -> Result<ScheduleSummary, SimError> {
    ScheduleExplorer::new(alg, depth_cap).explore(init)
}
