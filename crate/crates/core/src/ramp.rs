//! Multi-counter fixture whose runs always take exactly `n × Σ (cap_j − 1)`
//! moves from the all-minimum state.
//!
//! Every node holds one counter per cap, each ranging over `1..=cap`. A node
//! is forbidden when it has a counter below its cap and no neighbor with a
//! larger ID is in the same situation; it then raises its lowest-index
//! deficient counter by one.

use crate::framework::{Algorithm, Domain, Exhausted, GlobalState, LatticeKind, LocalState, VarRange};
use crate::graph::{Graph, NodeId};

#[derive(Clone, Debug)]
pub struct Ramp {
    graph: Graph,
    caps: Vec<u32>,
    domain: Domain,
}

impl Ramp {
    /// Panics if `caps` is empty or holds a zero.
    pub fn new(graph: Graph, caps: &[u32]) -> Self {
        assert!(!caps.is_empty() && caps.iter().all(|&c| c >= 1), "caps must be >= 1");
        let domain = Domain::new(graph.node_count(), caps.iter().map(|&c| VarRange::new(1, c)).collect());
        Ramp {
            graph,
            caps: caps.to_vec(),
            domain,
        }
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    fn deficient(&self, s: &GlobalState, i: NodeId) -> bool {
        s.local(i).iter().zip(&self.caps).any(|(v, c)| v < c)
    }

    /// Sum of remaining increments at one node.
    pub fn deficit(&self, s: &GlobalState, i: NodeId) -> u64 {
        s.local(i).iter().zip(&self.caps).map(|(&v, &c)| (c - v) as u64).sum()
    }
}

impl Algorithm for Ramp {
    fn name(&self) -> &'static str {
        "ramp"
    }

    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn read_radius(&self) -> usize {
        1
    }

    fn is_forbidden(&self, state: &GlobalState, node: NodeId) -> bool {
        self.deficient(state, node)
            && self
                .graph
                .neighbors(node)
                .all(|j| j < node || !self.deficient(state, j))
    }

    fn next_local(&self, state: &GlobalState, node: NodeId) -> Result<LocalState, Exhausted> {
        let mut local = LocalState::from_slice(state.local(node));
        let slot = local
            .0
            .iter()
            .zip(&self.caps)
            .position(|(v, c)| v < c)
            .ok_or(Exhausted { node })?;
        local.0[slot] += 1;
        Ok(local)
    }

    fn is_optimal(&self, state: &GlobalState) -> bool {
        self.graph.nodes().all(|i| !self.deficient(state, i))
    }

    fn rank(&self, state: &GlobalState) -> u64 {
        self.graph.nodes().map(|i| self.deficit(state, i)).sum()
    }

    fn lattice_kind(&self) -> LatticeKind {
        LatticeKind::Product
    }
}

/// The fixture as a trait object, for callers that only need the rule set.
pub fn ramp_fixture(graph: Graph, caps: &[u32]) -> Box<dyn Algorithm> {
    Box::new(Ramp::new(graph, caps))
}
