//! Undirected simple graphs with totally ordered node identifiers.
//!
//! Nodes are identified by their 1-based input index; the same order is used
//! wherever a guard breaks ties by comparing identifiers.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rand::Rng;
use thiserror::Error;

/// 1-based node identifier. The numeric value doubles as the node's ID in
/// tie-breaking comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    /// Creates an identifier from a 0-based position.
    pub fn from_index(index: usize) -> Self {
        NodeId(index + 1)
    }

    /// The 0-based position of this node.
    pub fn index(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    Empty,
    #[error("node {node} out of range 1..={n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("hop radius must be at least 1")]
    ZeroRadius,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    /// Sorted 0-based neighbor lists.
    adj: Vec<Vec<usize>>,
    edges: Vec<(NodeId, NodeId)>,
}

impl Graph {
    /// Builds a graph on nodes `1..=n` from 1-based endpoint pairs.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut adj = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for node in [u, v] {
                if node == 0 || node > n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(key.0, key.1));
            }
            adj[u - 1].push(v - 1);
            adj[v - 1].push(u - 1);
            normalized.push((NodeId(key.0), NodeId(key.1)));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        normalized.sort();
        Ok(Graph { adj, edges: normalized })
    }

    pub fn edgeless(n: usize) -> Result<Self, GraphError> {
        Self::new(n, &[])
    }

    pub fn path(n: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        Self::new(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        let mut edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        if n >= 3 {
            edges.push((n, 1));
        }
        Self::new(n, &edges)
    }

    /// Node 1 is the hub.
    pub fn star(n: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (2..=n).map(|i| (1, i)).collect();
        Self::new(n, &edges)
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        for u in 1..=n {
            for v in u + 1..=n {
                edges.push((u, v));
            }
        }
        Self::new(n, &edges)
    }

    /// Random connected graph: a random spanning tree plus each remaining
    /// pair independently with probability `extra_edge_prob`.
    pub fn random_connected<R: Rng + ?Sized>(n: usize, extra_edge_prob: f64, rng: &mut R) -> Result<Self, GraphError> {
        let mut edges = BTreeSet::new();
        for v in 2..=n {
            let u = rng.gen_range(1..v);
            edges.insert((u, v));
        }
        for u in 1..=n {
            for v in u + 1..=n {
                if !edges.contains(&(u, v)) && rng.gen_bool(extra_edge_prob) {
                    edges.insert((u, v));
                }
            }
        }
        let edges: Vec<_> = edges.into_iter().collect();
        Self::new(n, &edges)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.adj.len()).map(NodeId::from_index)
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.0 >= 1 && node.0 <= self.adj.len()
    }

    fn check(&self, node: NodeId) -> Result<(), GraphError> {
        if self.contains(node) {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange {
                node: node.0,
                n: self.adj.len(),
            })
        }
    }

    /// Neighbors of `node`, ascending. Panics if `node` is out of range.
    pub fn neighbors(&self, node: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj[node.index()].iter().map(|&j| NodeId::from_index(j))
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.contains(u) && self.adj[u.index()].binary_search(&v.index()).is_ok()
    }

    pub fn adjacency(&self, node: NodeId) -> Result<BTreeSet<NodeId>, GraphError> {
        self.check(node)?;
        Ok(self.neighbors(node).collect())
    }

    /// All nodes other than `node` within `radius` hops. Bounded BFS.
    pub fn k_hop(&self, node: NodeId, radius: usize) -> Result<BTreeSet<NodeId>, GraphError> {
        self.check(node)?;
        if radius == 0 {
            return Err(GraphError::ZeroRadius);
        }
        let mut dist = vec![usize::MAX; self.adj.len()];
        let mut queue = VecDeque::new();
        dist[node.index()] = 0;
        queue.push_back(node.index());
        let mut found = BTreeSet::new();
        while let Some(u) = queue.pop_front() {
            if dist[u] == radius {
                continue;
            }
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    found.insert(NodeId::from_index(v));
                    queue.push_back(v);
                }
            }
        }
        Ok(found)
    }

    /// Parses the text graph format: `#` comment lines, a header line `n m`,
    /// then `m` lines `u v` with 1-based endpoints.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (header_line, header) = lines.next().ok_or(GraphError::Parse {
            line: text.lines().count().max(1),
            message: "missing header line \"n m\"".into(),
        })?;
        let nums = parse_fields(header_line, header, 2)?;
        let (n, m) = (nums[0], nums[1]);

        if n == 0 {
            return Err(GraphError::Parse {
                line: header_line,
                message: GraphError::Empty.to_string(),
            });
        }

        let mut edges = Vec::with_capacity(m);
        let mut seen = BTreeSet::new();
        let mut last_line = header_line;
        for _ in 0..m {
            let (line, body) = lines.next().ok_or_else(|| GraphError::Parse {
                line: last_line + 1,
                message: format!("expected {m} edge lines, found {}", edges.len()),
            })?;
            let pair = parse_fields(line, body, 2)?;
            let (u, v) = (pair[0], pair[1]);
            let structural = if u == 0 || u > n || v == 0 || v > n {
                Some(GraphError::NodeOutOfRange {
                    node: if u == 0 || u > n { u } else { v },
                    n,
                })
            } else if u == v {
                Some(GraphError::SelfLoop(u))
            } else if !seen.insert((u.min(v), u.max(v))) {
                Some(GraphError::DuplicateEdge(u.min(v), u.max(v)))
            } else {
                None
            };
            if let Some(e) = structural {
                return Err(GraphError::Parse {
                    line,
                    message: e.to_string(),
                });
            }
            edges.push((u, v));
            last_line = line;
        }
        if let Some((line, _)) = lines.next() {
            return Err(GraphError::Parse {
                line,
                message: format!("unexpected data after {m} edges"),
            });
        }
        Graph::new(n, &edges)
    }
}

fn parse_fields(line: usize, body: &str, count: usize) -> Result<Vec<usize>, GraphError> {
    let fields: Vec<&str> = body.split_whitespace().collect();
    if fields.len() != count {
        return Err(GraphError::Parse {
            line,
            message: format!("expected {count} integers, found {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<usize>().map_err(|_| GraphError::Parse {
                line,
                message: format!("invalid integer {f:?}"),
            })
        })
        .collect()
}

impl fmt::Display for Graph {
    /// Writes the graph in the text format accepted by [`Graph::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.node_count(), self.edges.len())?;
        for (u, v) in &self.edges {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}
