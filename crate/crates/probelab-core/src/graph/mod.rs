//! Bounded-degree port-numbered graphs and half-edge labelings.
//!
//! A [`PortedGraph`] is immutable after construction: every generator and
//! transformation returns a fresh, validated graph. Ports are 1-based. The
//! port sets are normally contiguous `1..=deg`, but witness extraction keeps
//! the original port numbers of boundary nodes, so gaps are allowed and
//! `degree` is simply the number of live ports.

pub(crate) mod gen;
mod io;
mod power;
mod verify;

pub use gen::{build_from_edges, gen_edge_colored_tree, gen_random_regular};
pub use io::{graph_from_json, graph_to_json, labeling_from_json, labeling_to_json};
pub use power::power_graph;
pub use verify::{verify_solution, Problem, Verdict, Violation};

use std::collections::BTreeMap;
use thiserror::Error;

/// Internal node index, `0..node_count`.
pub type NodeIdx = usize;
/// Identifier visible to probe algorithms.
pub type NodeId = u64;
/// 1-based port number.
pub type Port = usize;

pub const OUT: &str = "OUT";
pub const IN: &str = "IN";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {node}: port {port} out of declared degree bound delta={delta}")]
    DegreeBound { node: NodeIdx, port: Port, delta: usize },
    #[error("node {node}: duplicate port {port}")]
    DuplicatePort { node: NodeIdx, port: Port },
    #[error("reciprocity broken at node {node} port {port}")]
    Reciprocity { node: NodeIdx, port: Port },
    #[error("duplicate node id {id}")]
    DuplicateId { id: NodeId },
    #[error("edge coloring not proper at node {node}: color {color} repeats")]
    ImproperEdgeColoring { node: NodeIdx, color: u32 },
    #[error("edge color entry ({u},{v}) does not match an edge")]
    ColorWithoutEdge { u: NodeIdx, v: NodeIdx },
    #[error("edge ({u},{v}) missing a color")]
    MissingEdgeColor { u: NodeIdx, v: NodeIdx },
    #[error("{0}")]
    Infeasible(String),
}

/// One directed half-edge entry in an adjacency list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfEdgeTarget {
    pub port: Port,
    pub neighbor: NodeIdx,
    pub reciprocal_port: Port,
}

#[derive(Debug, Clone)]
pub struct PortedGraph {
    delta: usize,
    ids: Vec<NodeId>,
    adjacency: Vec<Vec<HalfEdgeTarget>>,
    id_index: BTreeMap<NodeId, NodeIdx>,
    edge_colors: Option<BTreeMap<(NodeIdx, NodeIdx), u32>>,
    input_labels: Option<BTreeMap<(NodeIdx, Port), String>>,
}

impl PortedGraph {
    /// Builds and validates a graph. Adjacency lists may be in any order;
    /// they are sorted by port.
    pub fn new(
        delta: usize,
        ids: Vec<NodeId>,
        mut adjacency: Vec<Vec<HalfEdgeTarget>>,
        edge_colors: Option<BTreeMap<(NodeIdx, NodeIdx), u32>>,
        input_labels: Option<BTreeMap<(NodeIdx, Port), String>>,
    ) -> Result<Self, GraphError> {
        assert_eq!(ids.len(), adjacency.len());
        for list in adjacency.iter_mut() {
            list.sort_by_key(|t| t.port);
        }
        let mut id_index = BTreeMap::new();
        for (v, &id) in ids.iter().enumerate() {
            if id_index.insert(id, v).is_some() {
                return Err(GraphError::DuplicateId { id });
            }
        }
        let g = PortedGraph { delta, ids, adjacency, id_index, edge_colors, input_labels };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), GraphError> {
        for v in 0..self.node_count() {
            if self.adjacency[v].len() > self.delta {
                return Err(GraphError::DegreeBound {
                    node: v,
                    port: self.adjacency[v].len(),
                    delta: self.delta,
                });
            }
            let mut last_port = 0;
            for t in &self.adjacency[v] {
                if t.port == 0 || t.port == last_port {
                    return Err(GraphError::DuplicatePort { node: v, port: t.port });
                }
                last_port = t.port;
                match self.port_target(t.neighbor, t.reciprocal_port) {
                    Some(back) if back.neighbor == v && back.port == t.reciprocal_port && back.reciprocal_port == t.port => {}
                    _ => return Err(GraphError::Reciprocity { node: v, port: t.port }),
                }
            }
        }
        if let Some(colors) = &self.edge_colors {
            for (&(u, v), _) in colors.iter() {
                if !(u < v) || !self.adjacency[u].iter().any(|t| t.neighbor == v) {
                    return Err(GraphError::ColorWithoutEdge { u, v });
                }
            }
            for v in 0..self.node_count() {
                let mut seen = Vec::new();
                for t in &self.adjacency[v] {
                    let key = edge_key(v, t.neighbor);
                    let c = *colors
                        .get(&key)
                        .ok_or(GraphError::MissingEdgeColor { u: key.0, v: key.1 })?;
                    if seen.contains(&c) {
                        return Err(GraphError::ImproperEdgeColoring { node: v, color: c });
                    }
                    seen.push(c);
                }
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn degree(&self, v: NodeIdx) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn id_of(&self, v: NodeIdx) -> NodeId {
        self.ids[v]
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn index_of_id(&self, id: NodeId) -> Option<NodeIdx> {
        self.id_index.get(&id).copied()
    }

    pub fn ports(&self, v: NodeIdx) -> &[HalfEdgeTarget] {
        &self.adjacency[v]
    }

    pub fn port_target(&self, v: NodeIdx, port: Port) -> Option<&HalfEdgeTarget> {
        self.adjacency[v]
            .binary_search_by_key(&port, |t| t.port)
            .ok()
            .map(|i| &self.adjacency[v][i])
    }

    pub fn neighbors(&self, v: NodeIdx) -> impl Iterator<Item = NodeIdx> + '_ {
        self.adjacency[v].iter().map(|t| t.neighbor)
    }

    /// Each undirected edge once, as `(u, v, u_port, v_port)` with `u < v`.
    pub fn edges(&self) -> Vec<(NodeIdx, NodeIdx, Port, Port)> {
        let mut out = Vec::new();
        for u in 0..self.node_count() {
            for t in &self.adjacency[u] {
                if u < t.neighbor {
                    out.push((u, t.neighbor, t.port, t.reciprocal_port));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        (0..self.node_count()).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    pub fn edge_color(&self, u: NodeIdx, v: NodeIdx) -> Option<u32> {
        self.edge_colors.as_ref().and_then(|m| m.get(&edge_key(u, v)).copied())
    }

    pub fn edge_colors(&self) -> Option<&BTreeMap<(NodeIdx, NodeIdx), u32>> {
        self.edge_colors.as_ref()
    }

    pub fn input_label(&self, v: NodeIdx, port: Port) -> Option<&str> {
        self.input_labels.as_ref().and_then(|m| m.get(&(v, port)).map(|s| s.as_str()))
    }

    pub fn input_labels(&self) -> Option<&BTreeMap<(NodeIdx, Port), String>> {
        self.input_labels.as_ref()
    }

    /// All half-edges `(node, port)` in node order.
    pub fn half_edges(&self) -> Vec<(NodeIdx, Port)> {
        let mut out = Vec::new();
        for v in 0..self.node_count() {
            for t in &self.adjacency[v] {
                out.push((v, t.port));
            }
        }
        out
    }

    /// BFS distances from `src`; `usize::MAX` marks unreachable nodes.
    pub fn bfs_distances(&self, src: NodeIdx) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.node_count()];
        let mut queue = std::collections::VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for t in &self.adjacency[u] {
                if dist[t.neighbor] == usize::MAX {
                    dist[t.neighbor] = dist[u] + 1;
                    queue.push_back(t.neighbor);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        if self.node_count() == 0 {
            return true;
        }
        self.bfs_distances(0).iter().all(|&d| d != usize::MAX)
    }

    pub fn is_acyclic(&self) -> bool {
        // A forest has exactly n - c edges for c components.
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut components = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            components += 1;
            let d = self.bfs_distances(s);
            for (v, &dv) in d.iter().enumerate() {
                if dv != usize::MAX {
                    seen[v] = true;
                }
            }
        }
        self.edge_count() == n - components
    }

    /// Girth by per-node BFS; `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        let n = self.node_count();
        let mut best: Option<usize> = None;
        for s in 0..n {
            let mut dist = vec![usize::MAX; n];
            let mut parent = vec![usize::MAX; n];
            let mut queue = std::collections::VecDeque::new();
            dist[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for t in &self.adjacency[u] {
                    let w = t.neighbor;
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        queue.push_back(w);
                    } else if parent[u] != w {
                        // Non-tree edge closes a cycle through s of length
                        // at most dist[u] + dist[w] + 1.
                        let len = dist[u] + dist[w] + 1;
                        if best.map_or(true, |b| len < b) {
                            best = Some(len);
                        }
                    }
                }
            }
        }
        best
    }

    /// Induced subgraph on `keep` (indices into `self`), preserving ids,
    /// original port numbers, edge colors, and input labels. Returns the new
    /// graph and the map old index -> new index.
    pub fn induced_subgraph(&self, keep: &[NodeIdx]) -> (PortedGraph, BTreeMap<NodeIdx, NodeIdx>) {
        let mut remap = BTreeMap::new();
        for (new, &old) in keep.iter().enumerate() {
            remap.insert(old, new);
        }
        let mut adjacency = vec![Vec::new(); keep.len()];
        for (&old, &new) in remap.iter() {
            for t in &self.adjacency[old] {
                if let Some(&nb) = remap.get(&t.neighbor) {
                    adjacency[new].push(HalfEdgeTarget {
                        port: t.port,
                        neighbor: nb,
                        reciprocal_port: t.reciprocal_port,
                    });
                }
            }
        }
        let ids = keep.iter().map(|&v| self.ids[v]).collect();
        let edge_colors = self.edge_colors.as_ref().map(|m| {
            m.iter()
                .filter_map(|(&(u, v), &c)| {
                    Some((edge_key(*remap.get(&u)?, *remap.get(&v)?), c))
                })
                .collect()
        });
        let input_labels = self.input_labels.as_ref().map(|m| {
            m.iter()
                .filter_map(|(&(v, p), s)| Some(((*remap.get(&v)?, p), s.clone())))
                .collect()
        });
        let g = PortedGraph::new(self.delta, ids, adjacency, edge_colors, input_labels)
            .expect("induced subgraph of a valid graph is valid");
        (g, remap)
    }
}

pub fn edge_key(u: NodeIdx, v: NodeIdx) -> (NodeIdx, NodeIdx) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A half-edge labeling over a finite output alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfEdgeLabeling {
    pub alphabet: Vec<String>,
    pub labels: BTreeMap<(NodeIdx, Port), String>,
}

impl HalfEdgeLabeling {
    pub fn new(alphabet: Vec<String>) -> Self {
        HalfEdgeLabeling { alphabet, labels: BTreeMap::new() }
    }

    pub fn set(&mut self, v: NodeIdx, port: Port, label: impl Into<String>) {
        self.labels.insert((v, port), label.into());
    }

    pub fn get(&self, v: NodeIdx, port: Port) -> Option<&str> {
        self.labels.get(&(v, port)).map(|s| s.as_str())
    }

    /// Orientation encoding: every half-edge carries OUT or IN.
    pub fn orientation_alphabet() -> Vec<String> {
        vec![OUT.to_string(), IN.to_string()]
    }

    /// Encodes a node coloring: each half-edge of `v` carries `colors[v]`.
    pub fn from_node_colors(g: &PortedGraph, colors: &[u32], palette: usize) -> Self {
        let alphabet = (1..=palette).map(|c| c.to_string()).collect();
        let mut lab = HalfEdgeLabeling { alphabet, labels: BTreeMap::new() };
        for v in 0..g.node_count() {
            for t in g.ports(v) {
                lab.set(v, t.port, colors[v].to_string());
            }
        }
        lab
    }

    /// Encodes the graph's own edge coloring as a half-edge labeling.
    pub fn from_edge_colors(g: &PortedGraph) -> Option<Self> {
        let colors = g.edge_colors()?;
        let alphabet = (1..=g.delta()).map(|c| c.to_string()).collect();
        let mut lab = HalfEdgeLabeling { alphabet, labels: BTreeMap::new() };
        for v in 0..g.node_count() {
            for t in g.ports(v) {
                let c = colors[&edge_key(v, t.neighbor)];
                lab.set(v, t.port, c.to_string());
            }
        }
        Some(lab)
    }
}
