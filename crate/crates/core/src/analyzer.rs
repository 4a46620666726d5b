//! Exhaustive structural analysis of finite state spaces.
//!
//! A [`TransitionSystem`] is either the transition skeleton of an algorithm
//! (one edge per forbidden node and state) or the covering relation of the
//! coordinatewise product order. Both are partitioned into weakly connected
//! components, and each component can be checked for the lattice properties
//! the engine relies on: acyclicity, unit steps, a consistent per-coordinate
//! order, progress towards a unique sink, joins, and a decreasing rank.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::framework::{
    forbidden_nodes, semantic_forbidden, state_less_than, Algorithm, CapacityError, Direction, Domain, GlobalState,
    LatticeKind, StateOrder,
};
use crate::graph::NodeId;

/// Largest component on which joins and upper sets are computed.
pub const COMPONENT_CHECK_CAP: usize = 1 << 12;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error("component {component} has {} sinks", sinks.len())]
    MultipleSinks { component: usize, sinks: Vec<GlobalState> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructureKind {
    /// Edges are the moves of forbidden nodes.
    Transitions,
    /// Edges are the covering pairs of the product order.
    ProductOrder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub node: NodeId,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// State indices, ascending.
    pub states: Vec<usize>,
    pub sinks: Vec<usize>,
    pub sources: Vec<usize>,
}

impl Component {
    pub fn supremum(&self) -> Option<usize> {
        (self.sinks.len() == 1).then(|| self.sinks[0])
    }

    pub fn infimum(&self) -> Option<usize> {
        (self.sources.len() == 1).then(|| self.sources[0])
    }
}

#[derive(Clone, Debug)]
pub struct TransitionSystem {
    domain: Domain,
    kind: StructureKind,
    /// Sorted by `(from, node)`.
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    /// `(state, node)` pairs where a forbidden node had no move left.
    exhausted: Vec<(usize, NodeId)>,
    components: Vec<Component>,
    component_of: Vec<usize>,
}

impl TransitionSystem {
    fn build(domain: Domain, kind: StructureKind, per_state: Vec<(Vec<Edge>, Vec<NodeId>)>) -> Self {
        let count = per_state.len();
        let mut edges = Vec::new();
        let mut offsets = Vec::with_capacity(count + 1);
        let mut exhausted = Vec::new();
        for (idx, (out, stuck)) in per_state.into_iter().enumerate() {
            offsets.push(edges.len());
            edges.extend(out);
            exhausted.extend(stuck.into_iter().map(|n| (idx, n)));
        }
        offsets.push(edges.len());

        let mut uf = UnionFind::<usize>::new(count);
        for e in &edges {
            uf.union(e.from, e.to);
        }
        let mut by_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut components: Vec<Component> = Vec::new();
        let mut component_of = vec![0; count];
        for (idx, slot) in component_of.iter_mut().enumerate() {
            let root = uf.find(idx);
            let c = *by_root.entry(root).or_insert_with(|| {
                components.push(Component {
                    states: Vec::new(),
                    sinks: Vec::new(),
                    sources: Vec::new(),
                });
                components.len() - 1
            });
            components[c].states.push(idx);
            *slot = c;
        }
        let mut has_in = vec![false; count];
        for e in &edges {
            has_in[e.to] = true;
        }
        for comp in &mut components {
            for &s in &comp.states {
                if offsets[s] == offsets[s + 1] {
                    comp.sinks.push(s);
                }
                if !has_in[s] {
                    comp.sources.push(s);
                }
            }
        }
        TransitionSystem {
            domain,
            kind,
            edges,
            offsets,
            exhausted,
            components,
            component_of,
        }
    }

    /// Every state of the algorithm with one edge per forbidden node.
    pub fn from_algorithm(alg: &dyn Algorithm) -> Result<Self, CapacityError> {
        let domain = alg.domain().clone();
        let count = domain.enumerable_count("state space")?;
        let per_state: Vec<(Vec<Edge>, Vec<NodeId>)> = (0..count)
            .into_par_iter()
            .map(|idx| {
                let state = domain.state_at(idx);
                let mut out = Vec::new();
                let mut stuck = Vec::new();
                for node in forbidden_nodes(alg, &state) {
                    match alg.next_local(&state, node) {
                        Ok(next) => out.push(Edge {
                            from: idx,
                            node,
                            to: domain.index_of(&state.with_local(node, next.values())),
                        }),
                        Err(_) => stuck.push(node),
                    }
                }
                (out, stuck)
            })
            .collect();
        Ok(Self::build(domain, StructureKind::Transitions, per_state))
    }

    /// Hasse diagram of the coordinatewise product order on `domain`.
    pub fn product_lattice(domain: &Domain) -> Result<Self, CapacityError> {
        let count = domain.enumerable_count("product lattice")?;
        let coords = domain.coordinates();
        let mut strides = vec![1usize; coords];
        for c in (0..coords.saturating_sub(1)).rev() {
            strides[c] = strides[c + 1] * domain.var_of_coordinate(c + 1).size() as usize;
        }
        let per_state = (0..count)
            .into_par_iter()
            .map(|idx| {
                let state = domain.state_at(idx);
                let out = (0..coords)
                    .filter(|&c| state.values()[c] < domain.var_of_coordinate(c).hi)
                    .map(|c| Edge {
                        from: idx,
                        node: domain.node_of_coordinate(c),
                        to: idx + strides[c],
                    })
                    .collect();
                (out, Vec::new())
            })
            .collect();
        Ok(Self::build(domain.clone(), StructureKind::ProductOrder, per_state))
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    pub fn state_count(&self) -> usize {
        self.component_of.len()
    }

    pub fn state(&self, idx: usize) -> GlobalState {
        self.domain.state_at(idx)
    }

    pub fn index_of(&self, state: &GlobalState) -> usize {
        self.domain.index_of(state)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, idx: usize) -> &[Edge] {
        &self.edges[self.offsets[idx]..self.offsets[idx + 1]]
    }

    pub fn exhausted(&self) -> &[(usize, NodeId)] {
        &self.exhausted
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_of(&self, idx: usize) -> usize {
        self.component_of[idx]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.out_edges(from).iter().any(|e| e.to == to)
    }

    /// The variant checked along edges: the algorithm's rank on a skeleton,
    /// the distance to the top on a product order.
    pub fn rank(&self, alg: &dyn Algorithm, state: &GlobalState) -> u64 {
        match self.kind {
            StructureKind::Transitions => alg.rank(state),
            StructureKind::ProductOrder => state
                .values()
                .iter()
                .enumerate()
                .map(|(c, &v)| (self.domain.var_of_coordinate(c).hi - v) as u64)
                .sum(),
        }
    }
}

/// The transition skeleton of `alg`.
pub fn enumerate(alg: &dyn Algorithm) -> Result<TransitionSystem, CapacityError> {
    TransitionSystem::from_algorithm(alg)
}

/// The structure treated as the algorithm's lattice: its own skeleton for
/// induced lattices, the product order otherwise.
pub fn analyzed_structure(alg: &dyn Algorithm) -> Result<TransitionSystem, CapacityError> {
    match alg.lattice_kind() {
        LatticeKind::Induced => TransitionSystem::from_algorithm(alg),
        LatticeKind::Product => TransitionSystem::product_lattice(alg.domain()),
    }
}

/// The unique sink of every component, in component order.
pub fn component_suprema(ts: &TransitionSystem) -> Result<Vec<GlobalState>, AnalysisError> {
    ts.components()
        .iter()
        .enumerate()
        .map(|(c, comp)| match comp.supremum() {
            Some(s) => Ok(ts.state(s)),
            None => Err(AnalysisError::MultipleSinks {
                component: c,
                sinks: comp.sinks.iter().map(|&s| ts.state(s)).collect(),
            }),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl Check {
    pub fn new(name: &str, failure: Option<String>) -> Self {
        Check {
            name: name.to_string(),
            pass: failure.is_none(),
            counterexample: failure,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeReport {
    pub component: usize,
    pub size: usize,
    pub checks: Vec<Check>,
}

impl LatticeReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Reachability inside one acyclic component, indexed by topological
/// position.
struct Reach {
    /// Global state indices in topological order.
    order: Vec<usize>,
    position: BTreeMap<usize, usize>,
    /// `rows[p]`: positions reachable from `order[p]`, itself included.
    rows: Vec<FixedBitSet>,
}

/// Kahn's algorithm, smallest ready state first. `Err` names a state that
/// lies on a cycle.
fn topological_order(ts: &TransitionSystem, comp: &Component) -> Result<Vec<usize>, usize> {
    let mut indegree: BTreeMap<usize, usize> = comp.states.iter().map(|&s| (s, 0)).collect();
    for &s in &comp.states {
        for e in ts.out_edges(s) {
            *indegree.get_mut(&e.to).expect("edge stays in component") += 1;
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&s, _)| Reverse(s))
        .collect();
    let mut order = Vec::with_capacity(comp.states.len());
    while let Some(Reverse(s)) = ready.pop() {
        order.push(s);
        for e in ts.out_edges(s) {
            let d = indegree.get_mut(&e.to).expect("edge stays in component");
            *d -= 1;
            if *d == 0 {
                ready.push(Reverse(e.to));
            }
        }
    }
    if order.len() == comp.states.len() {
        Ok(order)
    } else {
        Err(*indegree
            .iter()
            .find(|(_, &d)| d > 0)
            .expect("a state left on a cycle")
            .0)
    }
}

fn reachability(ts: &TransitionSystem, comp: &Component) -> Result<Result<Reach, usize>, CapacityError> {
    if comp.states.len() > COMPONENT_CHECK_CAP {
        return Err(CapacityError {
            what: "lattice component".into(),
            size: comp.states.len() as u128,
            cap: COMPONENT_CHECK_CAP as u64,
        });
    }
    let order = match topological_order(ts, comp) {
        Ok(order) => order,
        Err(s) => return Ok(Err(s)),
    };
    let position: BTreeMap<usize, usize> = order.iter().enumerate().map(|(p, &s)| (s, p)).collect();
    let k = order.len();
    let mut rows = vec![FixedBitSet::with_capacity(k); k];
    for p in (0..k).rev() {
        let mut row = FixedBitSet::with_capacity(k);
        row.insert(p);
        for e in ts.out_edges(order[p]) {
            row.union_with(&rows[position[&e.to]]);
        }
        rows[p] = row;
    }
    Ok(Ok(Reach { order, position, rows }))
}

fn describe_edge(alg: &dyn Algorithm, ts: &TransitionSystem, e: &Edge) -> String {
    format!(
        "({}) -[{}]-> ({})",
        alg.format_state(&ts.state(e.from)),
        e.node,
        alg.format_state(&ts.state(e.to))
    )
}

/// Runs every lattice check on one component. Failures are report content;
/// only an oversized component is an error.
pub fn verify_lattice(
    alg: &dyn Algorithm,
    ts: &TransitionSystem,
    component: usize,
) -> Result<LatticeReport, CapacityError> {
    let comp = &ts.components()[component];
    let fmt = |idx: usize| format!("({})", alg.format_state(&ts.state(idx)));
    let edges: Vec<&Edge> = comp.states.iter().flat_map(|&s| ts.out_edges(s)).collect();
    let mut checks = Vec::new();

    let reach = reachability(ts, comp)?;
    checks.push(Check::new(
        "acyclic",
        reach.as_ref().err().map(|&s| format!("{} lies on a cycle", fmt(s))),
    ));

    let arity = ts.domain().arity();
    let unit = edges.iter().find_map(|e| {
        let (a, b) = (ts.state(e.from), ts.state(e.to));
        let changed: Vec<usize> = (0..a.values().len())
            .filter(|&c| a.values()[c] != b.values()[c])
            .collect();
        let ok = changed.len() == 1
            && changed[0] / arity == e.node.index()
            && a.values()[changed[0]].abs_diff(b.values()[changed[0]]) == 1;
        (!ok).then(|| describe_edge(alg, ts, e))
    });
    checks.push(Check::new("unit_step", unit));

    // Orient every coordinate by the direction its edges move it.
    let coords = ts.domain().coordinates();
    let mut directions: Vec<Option<(Direction, Edge)>> = vec![None; coords];
    let mut conflict = None;
    for e in &edges {
        let (a, b) = (ts.state(e.from), ts.state(e.to));
        for (c, slot) in directions.iter_mut().enumerate() {
            let (x, y) = (a.values()[c], b.values()[c]);
            if x == y {
                continue;
            }
            let dir = if x < y {
                Direction::Ascending
            } else {
                Direction::Descending
            };
            match *slot {
                None => *slot = Some((dir, **e)),
                Some((d, first)) if d != dir && conflict.is_none() => {
                    conflict = Some(format!(
                        "node {} moves both ways: {} and {}",
                        ts.domain().node_of_coordinate(c),
                        describe_edge(alg, ts, &first),
                        describe_edge(alg, ts, e)
                    ));
                }
                _ => {}
            }
        }
    }
    if conflict.is_none() {
        let order = StateOrder(
            directions
                .iter()
                .map(|d| d.map_or(Direction::Ascending, |(d, _)| d))
                .collect(),
        );
        conflict = edges.iter().find_map(|e| {
            let less = state_less_than(&ts.state(e.from), &ts.state(e.to), &order).expect("same domain");
            (!less).then(|| format!("{} does not ascend", describe_edge(alg, ts, e)))
        });
    }
    checks.push(Check::new("consistent_order", conflict));

    let progress = (comp.sinks.len() != 1).then(|| {
        let sinks: Vec<String> = comp.sinks.iter().take(4).map(|&s| fmt(s)).collect();
        format!("{} sinks: {}", comp.sinks.len(), sinks.join(" "))
    });
    checks.push(Check::new("unique_supremum", progress));

    let joins = match &reach {
        Err(_) => Some("order is not acyclic".to_string()),
        Ok(r) => missing_join(r).map(|(a, b)| format!("{} and {} have no least upper bound", fmt(a), fmt(b))),
    };
    checks.push(Check::new("joins", joins));

    let rank_fail = edges.iter().find_map(|e| {
        let (ra, rb) = (ts.rank(alg, &ts.state(e.from)), ts.rank(alg, &ts.state(e.to)));
        (rb >= ra).then(|| format!("{} rank {ra} -> {rb}", describe_edge(alg, ts, e)))
    });
    checks.push(Check::new("rank_decreasing", rank_fail));

    let zero_fail = comp.states.iter().find_map(|&s| {
        let zero = ts.rank(alg, &ts.state(s)) == 0;
        let sink = comp.sinks.contains(&s);
        (zero != sink).then(|| format!("{} rank zero: {zero}, sink: {sink}", fmt(s)))
    });
    checks.push(Check::new("rank_zero_iff_sink", zero_fail));

    Ok(LatticeReport {
        component,
        size: comp.states.len(),
        checks,
    })
}

/// First pair (by topological position) without a least upper bound.
fn missing_join(r: &Reach) -> Option<(usize, usize)> {
    let k = r.order.len();
    let counts: Vec<usize> = r.rows.iter().map(|row| row.count_ones(..)).collect();
    for a in 0..k {
        for b in a + 1..k {
            let common = r.rows[a].intersection_count(&r.rows[b]);
            if common == 0 {
                return Some((r.order[a], r.order[b]));
            }
            // The upper set is up-closed; its least element, if any, is the
            // earliest in topological order.
            let first = r.rows[a].intersection(&r.rows[b]).next().expect("non-empty");
            if counts[first] != common {
                return Some((r.order[a], r.order[b]));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub longest_path: usize,
    pub bound: u64,
    pub pass: bool,
    /// States along a longest path, or a cycle witness.
    pub witness: Vec<String>,
}

/// Longest path in an acyclic transition system; `Err` names a state on a
/// cycle.
pub fn longest_path(ts: &TransitionSystem) -> Result<Vec<usize>, usize> {
    let count = ts.state_count();
    let mut indegree = vec![0usize; count];
    for e in ts.edges() {
        indegree[e.to] += 1;
    }
    let mut stack: Vec<usize> = (0..count).filter(|&s| indegree[s] == 0).rev().collect();
    let mut order = Vec::with_capacity(count);
    while let Some(s) = stack.pop() {
        order.push(s);
        for e in ts.out_edges(s) {
            indegree[e.to] -= 1;
            if indegree[e.to] == 0 {
                stack.push(e.to);
            }
        }
    }
    if order.len() != count {
        return Err((0..count).find(|&s| indegree[s] > 0).expect("cycle"));
    }
    let mut length = vec![0usize; count];
    let mut next: Vec<Option<usize>> = vec![None; count];
    for &s in order.iter().rev() {
        for e in ts.out_edges(s) {
            if length[e.to] + 1 > length[s] {
                length[s] = length[e.to] + 1;
                next[s] = Some(e.to);
            }
        }
    }
    let mut at = (0..count).max_by_key(|&s| (length[s], Reverse(s))).expect("non-empty");
    let mut path = vec![at];
    while let Some(n) = next[at] {
        path.push(n);
        at = n;
    }
    Ok(path)
}

/// Longest execution on the skeleton against `n × Σ (m'_j − 1)`.
pub fn verify_bounds(alg: &dyn Algorithm, ts: &TransitionSystem) -> BoundReport {
    let bound = ts.domain().move_bound();
    let fmt = |s: usize| format!("({})", alg.format_state(&ts.state(s)));
    match longest_path(ts) {
        Ok(path) => {
            let longest = path.len() - 1;
            BoundReport {
                longest_path: longest,
                bound,
                pass: longest as u64 <= bound,
                witness: path.into_iter().map(fmt).collect(),
            }
        }
        Err(s) => BoundReport {
            longest_path: usize::MAX,
            bound,
            pass: false,
            witness: vec![format!("{} lies on a cycle", fmt(s))],
        },
    }
}

/// Check a set of observed move counts against the same bound.
pub fn verify_trace_bounds(max_moves: usize, domain: &Domain) -> BoundReport {
    let bound = domain.move_bound();
    BoundReport {
        longest_path: max_moves,
        bound,
        pass: max_moves as u64 <= bound,
        witness: Vec::new(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemanticExample {
    pub state: String,
    pub syntactic: Vec<usize>,
    pub semantic: Vec<usize>,
}

/// How the guard-based forbidden set relates to the brute-force one on
/// every state that violates the predicate.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SemanticReport {
    pub states_checked: usize,
    /// Violating states with no enabled guard.
    pub empty_syntactic: Vec<String>,
    pub equal: usize,
    pub syntactic_within_semantic: usize,
    pub semantic_within_syntactic: usize,
    pub divergent: usize,
    pub examples: Vec<SemanticExample>,
}

impl SemanticReport {
    pub fn pass(&self) -> bool {
        self.empty_syntactic.is_empty()
    }
}

const SEMANTIC_EXAMPLES: usize = 5;

/// Compares guard-enabled nodes with brute-force forbidden nodes, taking
/// upper sets from the reachability order of `ts`.
pub fn verify_semantic_forbidden(alg: &dyn Algorithm, ts: &TransitionSystem) -> Result<SemanticReport, CapacityError> {
    let optimal: Vec<bool> = (0..ts.state_count())
        .into_par_iter()
        .map(|s| alg.is_optimal(&ts.state(s)))
        .collect();
    let predicate = |s: &GlobalState| optimal[ts.index_of(s)];
    let mut report = SemanticReport::default();
    for comp in ts.components() {
        let reach = match reachability(ts, comp)? {
            Ok(r) => r,
            Err(s) => {
                report.empty_syntactic.push(format!(
                    "({}) lies on a cycle; upper sets undefined",
                    alg.format_state(&ts.state(s))
                ));
                continue;
            }
        };
        let states: Vec<GlobalState> = reach.order.iter().map(|&s| ts.state(s)).collect();
        for &s in &comp.states {
            if optimal[s] {
                continue;
            }
            report.states_checked += 1;
            let state = &states[reach.position[&s]];
            let syntactic: BTreeSet<NodeId> = forbidden_nodes(alg, state);
            let p = reach.position[&s];
            let above: Vec<&GlobalState> = reach.rows[p].ones().filter(|&q| q != p).map(|q| &states[q]).collect();
            let mut semantic = BTreeSet::new();
            for node in alg.graph().nodes() {
                if semantic_forbidden(node, state, predicate, above.iter().copied())? {
                    semantic.insert(node);
                }
            }
            if syntactic.is_empty() {
                report.empty_syntactic.push(format!("({})", alg.format_state(state)));
            }
            let relation = if syntactic == semantic {
                &mut report.equal
            } else if syntactic.is_subset(&semantic) {
                &mut report.syntactic_within_semantic
            } else if semantic.is_subset(&syntactic) {
                &mut report.semantic_within_syntactic
            } else {
                &mut report.divergent
            };
            *relation += 1;
            if syntactic != semantic && report.examples.len() < SEMANTIC_EXAMPLES {
                report.examples.push(SemanticExample {
                    state: alg.format_state(state),
                    syntactic: syntactic.iter().map(|n| n.0).collect(),
                    semantic: semantic.iter().map(|n| n.0).collect(),
                });
            }
        }
    }
    Ok(report)
}

/// Brute-force forbidden check for one state, with the upper set taken from
/// the reachability order of `ts`.
pub fn semantic_forbidden_in(
    alg: &dyn Algorithm,
    ts: &TransitionSystem,
    state: &GlobalState,
    node: NodeId,
) -> Result<bool, CapacityError> {
    let s = ts.index_of(state);
    let comp = &ts.components()[ts.component_of(s)];
    let reach = reachability(ts, comp)?.map_err(|_| CapacityError {
        what: "cyclic component".into(),
        size: comp.states.len() as u128,
        cap: 0,
    })?;
    let p = reach.position[&s];
    let above: Vec<GlobalState> = reach.rows[p]
        .ones()
        .filter(|&q| q != p)
        .map(|q| ts.state(reach.order[q]))
        .collect();
    semantic_forbidden(node, state, |x| alg.is_optimal(x), above.iter())
}

/// Every transition of `transitions` must be a covering pair of the
/// product order `lattice`.
pub fn check_transitions_within(
    alg: &dyn Algorithm,
    lattice: &TransitionSystem,
    transitions: &TransitionSystem,
) -> Check {
    let stray = transitions
        .edges()
        .iter()
        .find(|e| !lattice.has_edge(e.from, e.to))
        .map(|e| format!("{} is not a covering pair", describe_edge(alg, transitions, e)));
    Check::new("transitions_within_order", stray)
}

/// Graphviz rendering: one `digraph` per listed component, states bottom
/// to top, the unique sink drawn with a double border. Edges that also
/// appear in `overlay` are drawn bold.
pub fn export_dot_components(
    alg: &dyn Algorithm,
    ts: &TransitionSystem,
    components: &[usize],
    overlay: Option<&TransitionSystem>,
) -> String {
    let mut out = String::new();
    for &c in components {
        let comp = &ts.components()[c];
        let _ = writeln!(out, "digraph component_{c} {{");
        let _ = writeln!(out, "  rankdir=BT;");
        let _ = writeln!(out, "  node [shape=box];");
        for &s in &comp.states {
            let label = alg.format_state(&ts.state(s));
            let mark = if comp.supremum() == Some(s) {
                ", peripheries=2"
            } else {
                ""
            };
            let _ = writeln!(out, "  s{s} [label=\"({label})\"{mark}];");
        }
        for &s in &comp.states {
            for e in ts.out_edges(s) {
                let bold = match overlay {
                    Some(o) if o.has_edge(e.from, e.to) => ", style=bold",
                    _ => "",
                };
                let _ = writeln!(out, "  s{} -> s{} [label=\"{}\"{bold}];", e.from, e.to, e.node);
            }
        }
        let _ = writeln!(out, "}}");
    }
    out
}

pub fn export_dot(alg: &dyn Algorithm, ts: &TransitionSystem, overlay: Option<&TransitionSystem>) -> String {
    let all: Vec<usize> = (0..ts.components().len()).collect();
    export_dot_components(alg, ts, &all, overlay)
}
