//! Power graphs G^k.

use super::{HalfEdgeTarget, NodeIdx, PortedGraph};

/// G^k: same vertex set, an edge between any two nodes at distance 1..=k.
/// Ports are assigned canonically by neighbor id order. Edge colors and
/// input labels do not carry over.
pub fn power_graph(g: &PortedGraph, k: usize) -> PortedGraph {
    assert!(k >= 1, "power_graph requires k >= 1");
    let n = g.node_count();
    let mut nbrs: Vec<Vec<NodeIdx>> = vec![Vec::new(); n];
    for v in 0..n {
        for (w, d) in bounded_bfs(g, v, k) {
            if w != v && d >= 1 {
                nbrs[v].push(w);
            }
        }
        nbrs[v].sort_by_key(|&w| g.id_of(w));
    }
    let port_of = |v: NodeIdx, w: NodeIdx| {
        nbrs[v]
            .iter()
            .position(|&x| x == w)
            .expect("distance relation is symmetric")
            + 1
    };
    let mut adjacency: Vec<Vec<HalfEdgeTarget>> = vec![Vec::new(); n];
    for v in 0..n {
        for (i, &w) in nbrs[v].iter().enumerate() {
            adjacency[v].push(HalfEdgeTarget {
                port: i + 1,
                neighbor: w,
                reciprocal_port: port_of(w, v),
            });
        }
    }
    let delta_k = adjacency.iter().map(|l| l.len()).max().unwrap_or(0).max(1);
    PortedGraph::new(delta_k, g.ids().to_vec(), adjacency, None, None)
        .expect("power graph of a valid graph is valid")
}

/// Nodes within distance `k` of `src`, with their distances.
pub fn bounded_bfs(g: &PortedGraph, src: NodeIdx, k: usize) -> Vec<(NodeIdx, usize)> {
    let mut dist = std::collections::BTreeMap::new();
    let mut queue = std::collections::VecDeque::new();
    dist.insert(src, 0usize);
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        let du = dist[&u];
        if du == k {
            continue;
        }
        for w in g.neighbors(u) {
            if !dist.contains_key(&w) {
                dist.insert(w, du + 1);
                queue.push_back(w);
            }
        }
    }
    dist.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen::build_from_edges;
    use std::collections::BTreeSet;

    fn path(n: usize) -> PortedGraph {
        let edges: BTreeSet<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        build_from_edges(n, 2, &edges, 0).unwrap()
    }

    fn cycle(n: usize) -> PortedGraph {
        let mut edges: BTreeSet<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        edges.insert((0, n - 1));
        build_from_edges(n, 2, &edges, 0).unwrap()
    }

    #[test]
    fn path3_squared_is_triangle() {
        let g = power_graph(&path(3), 2);
        assert_eq!(g.edge_count(), 3);
        for v in 0..3 {
            assert_eq!(g.degree(v), 2);
        }
    }

    #[test]
    fn power_one_is_identity_up_to_ports() {
        let g = cycle(8);
        let p = power_graph(&g, 1);
        let mut a: Vec<_> = g.edges().iter().map(|&(u, v, _, _)| (u, v)).collect();
        let mut b: Vec<_> = p.edges().iter().map(|&(u, v, _, _)| (u, v)).collect();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn c6_squared_is_4_regular() {
        let p = power_graph(&cycle(6), 2);
        for v in 0..6 {
            assert_eq!(p.degree(v), 4);
        }
    }
}
