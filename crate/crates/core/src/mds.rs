//! Self-stabilizing minimal dominating set.
//!
//! Each node holds one flag `st ∈ {OUT, IN}` (encoded 0 and 1). A node is
//! *unsatisfied* when it could leave the set without breaking domination
//! (removable) or is outside and undominated (addable). Among unsatisfied
//! nodes in a 2-hop ball only the largest ID may move, and its move is a flip.

use crate::framework::{Algorithm, Domain, Exhausted, GlobalState, LatticeKind, LocalState, VarRange};
use crate::graph::{Graph, NodeId};

pub const OUT: u32 = 0;
pub const IN: u32 = 1;

fn is_in(s: &GlobalState, i: NodeId) -> bool {
    s.value(i) == IN
}

/// `i` is IN and every node of its closed neighborhood stays dominated
/// without it.
pub fn removable(g: &Graph, s: &GlobalState, i: NodeId) -> bool {
    if !is_in(s, i) {
        return false;
    }
    std::iter::once(i)
        .chain(g.neighbors(i))
        .all(|j| (j != i && is_in(s, j)) || g.neighbors(j).any(|k| k != i && is_in(s, k)))
}

/// `i` is OUT and has no IN neighbor.
pub fn addable(g: &Graph, s: &GlobalState, i: NodeId) -> bool {
    !is_in(s, i) && g.neighbors(i).all(|j| !is_in(s, j))
}

pub fn unsatisfied(g: &Graph, s: &GlobalState, i: NodeId) -> bool {
    removable(g, s, i) || addable(g, s, i)
}

/// `i` is unsatisfied and outranks every unsatisfied node within two hops.
pub fn forbidden_ds(g: &Graph, s: &GlobalState, i: NodeId) -> bool {
    let ball = g.k_hop(i, 2).expect("node in range");
    forbidden_in_ball(g, s, i, ball.iter().copied())
}

fn forbidden_in_ball(g: &Graph, s: &GlobalState, i: NodeId, ball: impl IntoIterator<Item = NodeId>) -> bool {
    unsatisfied(g, s, i) && ball.into_iter().all(|j| i > j || !unsatisfied(g, s, j))
}

/// Negates `st.i`; every other node is untouched.
pub fn flip(s: &GlobalState, i: NodeId) -> GlobalState {
    s.with_local(i, &[1 - s.value(i)])
}

pub fn state_value_ds(g: &Graph, s: &GlobalState, i: NodeId) -> u32 {
    unsatisfied(g, s, i) as u32
}

/// Number of unsatisfied nodes.
pub fn rank_ds(g: &Graph, s: &GlobalState) -> u64 {
    g.nodes().map(|i| state_value_ds(g, s, i) as u64).sum()
}

fn is_dominating(g: &Graph, in_set: &[bool]) -> bool {
    (0..g.node_count()).all(|v| in_set[v] || g.neighbors(NodeId::from_index(v)).any(|u| in_set[u.index()]))
}

/// Independent oracle: `s` is a dominating set and dropping any single member
/// breaks domination. Deliberately recomputes domination from scratch rather
/// than sharing the guard predicates.
pub fn is_minimal_dominating(g: &Graph, s: &GlobalState) -> bool {
    let mut in_set: Vec<bool> = s.values().iter().map(|&v| v == IN).collect();
    if !is_dominating(g, &in_set) {
        return false;
    }
    for v in 0..in_set.len() {
        if in_set[v] {
            in_set[v] = false;
            let still = is_dominating(g, &in_set);
            in_set[v] = true;
            if still {
                return false;
            }
        }
    }
    true
}

/// The dominating-set protocol bound to a graph, with 2-hop balls precomputed.
#[derive(Clone, Debug)]
pub struct Mds {
    graph: Graph,
    domain: Domain,
    balls: Vec<Vec<NodeId>>,
}

impl Mds {
    pub fn new(graph: Graph) -> Self {
        let balls = graph
            .nodes()
            .map(|i| graph.k_hop(i, 2).expect("node in range").into_iter().collect())
            .collect();
        let domain = Domain::uniform(graph.node_count(), VarRange::new(OUT, IN));
        Mds { graph, domain, balls }
    }

    pub fn ball(&self, i: NodeId) -> &[NodeId] {
        &self.balls[i.index()]
    }
}

impl Algorithm for Mds {
    fn name(&self) -> &'static str {
        "mds"
    }

    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    /// The guard compares `i` with nodes two hops away, and each of those
    /// reads two hops further to decide whether it is removable.
    fn read_radius(&self) -> usize {
        4
    }

    fn is_forbidden(&self, state: &GlobalState, node: NodeId) -> bool {
        forbidden_in_ball(&self.graph, state, node, self.ball(node).iter().copied())
    }

    fn next_local(&self, state: &GlobalState, node: NodeId) -> Result<LocalState, Exhausted> {
        Ok(LocalState::single(1 - state.value(node)))
    }

    fn is_optimal(&self, state: &GlobalState) -> bool {
        is_minimal_dominating(&self.graph, state)
    }

    fn rank(&self, state: &GlobalState) -> u64 {
        rank_ds(&self.graph, state)
    }

    fn lattice_kind(&self) -> LatticeKind {
        LatticeKind::Induced
    }

    fn format_value(&self, _var: usize, value: u32) -> String {
        if value == IN { "IN" } else { "OUT" }.to_string()
    }

    fn parse_value(&self, _var: usize, token: &str) -> Result<u32, String> {
        match token {
            "IN" => Ok(IN),
            "OUT" => Ok(OUT),
            _ => Err("expected IN or OUT".into()),
        }
    }
}
