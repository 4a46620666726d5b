//! Global states, local domains and the pluggable rule-set interface shared
//! by every algorithm the engine executes or analyzes.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use smallvec::SmallVec;
use thiserror::Error;

use crate::graph::{Graph, NodeId};

/// Largest state space the exhaustive operations will enumerate.
pub const ENUMERATION_CAP: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{what} has {size} states, above the enumeration cap of {cap}")]
pub struct CapacityError {
    pub what: String,
    /// Saturates at `u128::MAX`.
    pub size: u128,
    pub cap: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error("state has {found} nodes, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("node {node} holds {found} variables, expected {expected}")]
    ArityMismatch {
        node: NodeId,
        expected: usize,
        found: usize,
    },
    #[error("node {node}: value {value} outside {lo}..={hi}")]
    OutOfDomain { node: NodeId, value: u32, lo: u32, hi: u32 },
    #[error("invalid token {token:?} for node {node}: {reason}")]
    BadToken {
        node: NodeId,
        token: String,
        reason: String,
    },
}

/// The variables of one node. Most algorithms hold a single variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalState(pub SmallVec<[u32; 2]>);

impl LocalState {
    pub fn single(value: u32) -> Self {
        LocalState(SmallVec::from_slice(&[value]))
    }

    pub fn from_slice(values: &[u32]) -> Self {
        LocalState(SmallVec::from_slice(values))
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }
}

/// A full assignment of every node's variables, stored flat.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GlobalState {
    values: Vec<u32>,
    arity: usize,
}

impl GlobalState {
    /// One variable per node.
    pub fn from_values(values: Vec<u32>) -> Self {
        GlobalState { values, arity: 1 }
    }

    /// `values.len()` must be a multiple of `arity`.
    pub fn from_flat(values: Vec<u32>, arity: usize) -> Self {
        assert!(
            arity > 0 && values.len().is_multiple_of(arity),
            "flat state does not divide into nodes"
        );
        GlobalState { values, arity }
    }

    pub fn node_count(&self) -> usize {
        self.values.len() / self.arity
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// All variables, node-major.
    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Panics if `node` is out of range.
    pub fn local(&self, node: NodeId) -> &[u32] {
        let start = node.index() * self.arity;
        &self.values[start..start + self.arity]
    }

    /// Shorthand for the first variable of `node`.
    pub fn value(&self, node: NodeId) -> u32 {
        self.values[node.index() * self.arity]
    }

    pub fn local_state(&self, node: NodeId) -> LocalState {
        LocalState::from_slice(self.local(node))
    }

    pub fn set_local(&mut self, node: NodeId, local: &[u32]) {
        assert_eq!(local.len(), self.arity);
        let start = node.index() * self.arity;
        self.values[start..start + self.arity].copy_from_slice(local);
    }

    /// Successor that differs from `self` only at `node`.
    pub fn with_local(&self, node: NodeId, local: &[u32]) -> GlobalState {
        let mut next = self.clone();
        next.set_local(node, local);
        next
    }
}

/// Inclusive value range of one variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VarRange {
    pub lo: u32,
    pub hi: u32,
}

impl VarRange {
    pub fn new(lo: u32, hi: u32) -> Self {
        assert!(lo <= hi, "empty variable range");
        VarRange { lo, hi }
    }

    pub fn size(&self) -> u32 {
        self.hi - self.lo + 1
    }

    pub fn contains(&self, v: u32) -> bool {
        (self.lo..=self.hi).contains(&v)
    }
}

/// Per-node variable layout. Every node declares the same variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    nodes: usize,
    vars: Vec<VarRange>,
}

impl Domain {
    pub fn new(nodes: usize, vars: Vec<VarRange>) -> Self {
        assert!(nodes > 0 && !vars.is_empty());
        Domain { nodes, vars }
    }

    pub fn uniform(nodes: usize, range: VarRange) -> Self {
        Domain::new(nodes, vec![range])
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[VarRange] {
        &self.vars
    }

    pub fn coordinates(&self) -> usize {
        self.nodes * self.vars.len()
    }

    pub fn var_of_coordinate(&self, coord: usize) -> VarRange {
        self.vars[coord % self.vars.len()]
    }

    pub fn node_of_coordinate(&self, coord: usize) -> NodeId {
        NodeId::from_index(coord / self.vars.len())
    }

    /// Number of global states, saturating at `u128::MAX`.
    pub fn state_count(&self) -> u128 {
        let mut total: u128 = 1;
        for _ in 0..self.nodes {
            for var in &self.vars {
                total = total.saturating_mul(var.size() as u128);
            }
        }
        total
    }

    /// Fails when the state space exceeds [`ENUMERATION_CAP`].
    pub fn enumerable_count(&self, what: &str) -> Result<usize, CapacityError> {
        let size = self.state_count();
        if size > ENUMERATION_CAP as u128 {
            Err(CapacityError {
                what: what.to_string(),
                size,
                cap: ENUMERATION_CAP,
            })
        } else {
            Ok(size as usize)
        }
    }

    /// `n × Σ_j (m'_j − 1)`: the longest possible run of unit steps that
    /// never revisits a coordinate value.
    pub fn move_bound(&self) -> u64 {
        let per_node: u64 = self.vars.iter().map(|v| (v.size() - 1) as u64).sum();
        self.nodes as u64 * per_node
    }

    pub fn minimum(&self) -> GlobalState {
        let values = (0..self.coordinates()).map(|c| self.var_of_coordinate(c).lo).collect();
        GlobalState::from_flat(values, self.arity())
    }

    pub fn maximum(&self) -> GlobalState {
        let values = (0..self.coordinates()).map(|c| self.var_of_coordinate(c).hi).collect();
        GlobalState::from_flat(values, self.arity())
    }

    pub fn validate(&self, state: &GlobalState) -> Result<(), StateError> {
        if state.node_count() != self.nodes {
            return Err(StateError::LengthMismatch {
                expected: self.nodes,
                found: state.node_count(),
            });
        }
        if state.arity() != self.arity() {
            return Err(StateError::ArityMismatch {
                node: NodeId(1),
                expected: self.arity(),
                found: state.arity(),
            });
        }
        for (c, &value) in state.values().iter().enumerate() {
            let range = self.var_of_coordinate(c);
            if !range.contains(value) {
                return Err(StateError::OutOfDomain {
                    node: self.node_of_coordinate(c),
                    value,
                    lo: range.lo,
                    hi: range.hi,
                });
            }
        }
        Ok(())
    }

    /// Dense mixed-radix index; the first coordinate is most significant so
    /// index order coincides with lexicographic order of the values.
    pub fn index_of(&self, state: &GlobalState) -> usize {
        let mut index = 0usize;
        for (c, &value) in state.values().iter().enumerate() {
            let range = self.var_of_coordinate(c);
            index = index * range.size() as usize + (value - range.lo) as usize;
        }
        index
    }

    /// Inverse of [`Domain::index_of`].
    pub fn state_at(&self, mut index: usize) -> GlobalState {
        let coords = self.coordinates();
        let mut values = vec![0u32; coords];
        for c in (0..coords).rev() {
            let range = self.var_of_coordinate(c);
            let size = range.size() as usize;
            values[c] = range.lo + (index % size) as u32;
            index /= size;
        }
        GlobalState::from_flat(values, self.arity())
    }

    /// Uniform draw over the whole state space.
    pub fn random_state<R: Rng + ?Sized>(&self, rng: &mut R) -> GlobalState {
        let values = (0..self.coordinates())
            .map(|c| {
                let range = self.var_of_coordinate(c);
                rng.gen_range(range.lo..=range.hi)
            })
            .collect();
        GlobalState::from_flat(values, self.arity())
    }
}

/// Orientation of a coordinate's total order relative to its numeric encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Ascending,
    Descending,
}

impl Direction {
    pub fn less(self, a: u32, b: u32) -> bool {
        match self {
            Direction::Ascending => a < b,
            Direction::Descending => a > b,
        }
    }
}

/// One total order per coordinate; induces the partial order on global states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateOrder(pub Vec<Direction>);

impl StateOrder {
    pub fn ascending(coordinates: usize) -> Self {
        StateOrder(vec![Direction::Ascending; coordinates])
    }
}

/// `a < b`: every coordinate of `a` is at most that of `b` and at least one
/// is strictly below.
pub fn state_less_than(a: &GlobalState, b: &GlobalState, order: &StateOrder) -> Result<bool, StateError> {
    if a.values().len() != b.values().len() {
        return Err(StateError::LengthMismatch {
            expected: a.node_count(),
            found: b.node_count(),
        });
    }
    if order.0.len() != a.values().len() {
        return Err(StateError::LengthMismatch {
            expected: a.values().len(),
            found: order.0.len(),
        });
    }
    let mut strict = false;
    for ((&x, &y), dir) in a.values().iter().zip(b.values()).zip(&order.0) {
        if dir.less(y, x) {
            return Ok(false);
        }
        strict |= x != y;
    }
    Ok(strict)
}

/// The next local state of a forbidden node would leave its domain.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("node {node} has exhausted its domain")]
pub struct Exhausted {
    pub node: NodeId,
}

/// Which order the analyzer treats as the lattice of an algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeKind {
    /// The lattice is the one induced by the algorithm's own transitions.
    Induced,
    /// The lattice is the coordinatewise product order of the domain; the
    /// algorithm's transitions are a subrelation of its covering pairs.
    Product,
}

/// A guarded-command rule set over a graph.
///
/// Guards must only read variables of nodes within `read_radius` hops of the
/// evaluated node (plus the node itself).
pub trait Algorithm: Sync {
    fn name(&self) -> &'static str;

    fn graph(&self) -> &Graph;

    fn domain(&self) -> &Domain;

    fn read_radius(&self) -> usize;

    fn is_forbidden(&self, state: &GlobalState, node: NodeId) -> bool;

    /// The minimum-magnitude move of a forbidden node. Only meaningful when
    /// `is_forbidden(state, node)` holds.
    fn next_local(&self, state: &GlobalState, node: NodeId) -> Result<LocalState, Exhausted>;

    /// The problem predicate the algorithm is meant to establish.
    fn is_optimal(&self, state: &GlobalState) -> bool;

    /// Variant function that the algorithm drives towards zero.
    fn rank(&self, state: &GlobalState) -> u64;

    fn lattice_kind(&self) -> LatticeKind;

    fn format_value(&self, _var: usize, value: u32) -> String {
        value.to_string()
    }

    fn parse_value(&self, _var: usize, token: &str) -> Result<u32, String> {
        token.parse::<u32>().map_err(|e| e.to_string())
    }

    fn format_local(&self, local: &[u32]) -> String {
        local
            .iter()
            .enumerate()
            .map(|(var, &v)| self.format_value(var, v))
            .collect::<Vec<_>>()
            .join(":")
    }

    /// Comma-separated node tokens; multi-variable nodes join their variables
    /// with `:`.
    fn format_state(&self, state: &GlobalState) -> String {
        (0..state.node_count())
            .map(|i| self.format_local(state.local(NodeId::from_index(i))))
            .collect::<Vec<_>>()
            .join(",")
    }

    fn parse_state(&self, text: &str) -> Result<GlobalState, StateError> {
        let domain = self.domain();
        let tokens: Vec<&str> = text.trim().split(',').collect();
        if tokens.len() != domain.nodes() {
            return Err(StateError::LengthMismatch {
                expected: domain.nodes(),
                found: tokens.len(),
            });
        }
        let mut values = Vec::with_capacity(domain.coordinates());
        for (i, token) in tokens.iter().enumerate() {
            let node = NodeId::from_index(i);
            let parts: Vec<&str> = token.split(':').collect();
            if parts.len() != domain.arity() {
                return Err(StateError::ArityMismatch {
                    node,
                    expected: domain.arity(),
                    found: parts.len(),
                });
            }
            for (var, part) in parts.iter().enumerate() {
                let value = self.parse_value(var, part).map_err(|reason| StateError::BadToken {
                    node,
                    token: part.to_string(),
                    reason,
                })?;
                values.push(value);
            }
        }
        let state = GlobalState::from_flat(values, domain.arity());
        domain.validate(&state)?;
        Ok(state)
    }
}

/// Nodes whose guard is enabled in `state`.
pub fn forbidden_nodes(alg: &dyn Algorithm, state: &GlobalState) -> BTreeSet<NodeId> {
    alg.graph().nodes().filter(|&i| alg.is_forbidden(state, i)).collect()
}

/// Brute-force forbidden check against a predicate: `node` is forbidden in
/// `state` iff `state` violates `predicate` and so does every strictly greater
/// state that keeps `node`'s local state unchanged.
///
/// `above` must enumerate every state strictly above `state` in the order of
/// interest.
pub fn semantic_forbidden<'a, P, I>(
    node: NodeId,
    state: &GlobalState,
    predicate: P,
    above: I,
) -> Result<bool, CapacityError>
where
    P: Fn(&GlobalState) -> bool,
    I: IntoIterator<Item = &'a GlobalState>,
{
    if predicate(state) {
        return Ok(false);
    }
    let local = state.local(node);
    let mut visited: u64 = 0;
    for upper in above {
        visited += 1;
        if visited > ENUMERATION_CAP {
            return Err(CapacityError {
                what: "upper set".into(),
                size: visited as u128,
                cap: ENUMERATION_CAP,
            });
        }
        if upper.local(node) == local && predicate(upper) {
            return Ok(false);
        }
    }
    Ok(true)
}

impl fmt::Display for LocalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(":"))
    }
}
