//! Cluster decomposition: MIS centers on the power graph, parent-chain
//! Voronoi assignment, and the contracted multigraph.

use crate::graph::{power_graph, NodeIdx, PortedGraph};
use crate::local::coloring::{ball_growth_bound, cascade_colors_on};
use crate::local::mis_from_coloring;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("coloring failed: {0}")]
    Coloring(String),
    #[error("mis failed: {0}")]
    Mis(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterKind {
    Cyclic,
    TreeShaped,
}

#[derive(Debug, Clone)]
pub struct ClusterDecomposition {
    pub k: usize,
    /// MIS on G^k, by node index.
    pub centers: Vec<NodeIdx>,
    /// Node -> its center.
    pub assignment: Vec<NodeIdx>,
    /// Distance to the assigned center.
    pub dist_to_center: Vec<usize>,
    /// Center -> member nodes (sorted).
    pub members: std::collections::BTreeMap<NodeIdx, Vec<NodeIdx>>,
    pub kind: std::collections::BTreeMap<NodeIdx, ClusterKind>,
    /// Inter-cluster edges of G as (center_a, center_b, u, v) with
    /// cluster(u) = center_a, cluster(v) = center_b, center_a < center_b.
    /// Parallel edges are kept; sorted canonically.
    pub contracted_edges: Vec<(NodeIdx, NodeIdx, NodeIdx, NodeIdx)>,
    /// The distance-k coloring the MIS was derived from.
    pub colors: Vec<u64>,
}

/// Decomposes the graph around an MIS of G^k.
///
/// The coloring is the Linial cascade with the degree basis derived from
/// (delta, k) rather than the realized power-graph degree, so a per-query
/// replay can recompute any node's color from its radius-k ball alone. The
/// cluster of a node follows its best parent (smallest (distance, id)
/// neighbor strictly closer to the centers), which keeps every cluster
/// connected with radius <= k.
pub fn cluster_decompose(g: &PortedGraph, k: usize) -> Result<ClusterDecomposition, DecomposeError> {
    assert!(k >= 1);
    let n = g.node_count();
    let gk = power_graph(g, k);
    let basis = ball_growth_bound(g.delta(), k);
    let (colors, _) = cascade_colors_on(&gk, n as u128 + 1, basis);
    let in_mis = mis_from_coloring(&gk, &to_u32(&colors))
        .map_err(|e| DecomposeError::Mis(e.to_string()))?;
    let centers: Vec<NodeIdx> = (0..n).filter(|&v| in_mis[v]).collect();

    // Multi-source BFS for distances to the nearest center.
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for &c in &centers {
        dist[c] = 0;
        queue.push_back(c);
    }
    while let Some(u) = queue.pop_front() {
        for w in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }

    // Parent-chain assignment in increasing distance: the best parent is the
    // strictly-closer neighbor with the smallest (distance, id).
    let mut order: Vec<NodeIdx> = (0..n).collect();
    order.sort_by_key(|&v| (dist[v], g.id_of(v)));
    let mut assignment = vec![usize::MAX; n];
    for &v in &order {
        if dist[v] == 0 {
            assignment[v] = v;
            continue;
        }
        let parent = g
            .neighbors(v)
            .filter(|&u| dist[u] == dist[v] - 1)
            .min_by_key(|&u| (dist[u], g.id_of(u)))
            .expect("every non-center has a closer neighbor");
        assignment[v] = assignment[parent];
    }

    let mut members: std::collections::BTreeMap<NodeIdx, Vec<NodeIdx>> =
        centers.iter().map(|&c| (c, Vec::new())).collect();
    for v in 0..n {
        members.get_mut(&assignment[v]).expect("assigned to a center").push(v);
    }

    // Cluster kind: a connected cluster is cyclic iff it has at least as
    // many internal edges as nodes.
    let mut kind = std::collections::BTreeMap::new();
    for (&c, list) in &members {
        let set: std::collections::BTreeSet<NodeIdx> = list.iter().copied().collect();
        let mut internal = 0usize;
        for &v in list {
            internal += g.neighbors(v).filter(|u| set.contains(u) && *u > v).count();
        }
        kind.insert(c, if internal >= list.len() { ClusterKind::Cyclic } else { ClusterKind::TreeShaped });
    }

    let mut contracted_edges = Vec::new();
    for (u, v, _, _) in g.edges() {
        let (ca, cb) = (assignment[u], assignment[v]);
        if ca == cb {
            continue;
        }
        if ca < cb {
            contracted_edges.push((ca, cb, u, v));
        } else {
            contracted_edges.push((cb, ca, v, u));
        }
    }
    contracted_edges.sort_unstable();

    Ok(ClusterDecomposition {
        k,
        centers,
        assignment,
        dist_to_center: dist,
        members,
        kind,
        contracted_edges,
        colors,
    })
}

fn to_u32(colors: &[u64]) -> Vec<u32> {
    colors.iter().map(|&c| u32::try_from(c).expect("palette fits u32")).collect()
}

impl ClusterDecomposition {
    /// Leaving edges of one cluster (count includes parallel edges).
    pub fn leaving_edges(&self, center: NodeIdx) -> usize {
        self.contracted_edges
            .iter()
            .filter(|&&(a, b, _, _)| a == center || b == center)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen::build_from_edges;
    use crate::graph::gen_random_regular;
    use std::collections::BTreeSet;

    #[test]
    fn single_node_is_one_tree_cluster() {
        let g = build_from_edges(1, 3, &BTreeSet::new(), 0).unwrap();
        let d = cluster_decompose(&g, 2).unwrap();
        assert_eq!(d.centers, vec![0]);
        assert_eq!(d.kind[&0], ClusterKind::TreeShaped);
    }

    #[test]
    fn c6_k3_has_a_cyclic_cluster() {
        let mut edges: BTreeSet<_> = (0..5).map(|i| (i, i + 1)).collect();
        edges.insert((0, 5));
        let g = build_from_edges(6, 2, &edges, 0).unwrap();
        let d = cluster_decompose(&g, 3).unwrap();
        assert!(d.centers.len() <= 2);
        assert!(d.kind.values().any(|&k| k == ClusterKind::Cyclic));
    }

    #[test]
    fn partition_radius_and_connectivity_on_random_graphs() {
        for seed in 0..30u64 {
            let g = gen_random_regular(64, 3, 3, seed).unwrap();
            let d = cluster_decompose(&g, 2).unwrap();
            // Partition.
            let total: usize = d.members.values().map(|m| m.len()).sum();
            assert_eq!(total, 64);
            // Radius <= k and cluster connectivity via the parent chain.
            for (&c, list) in &d.members {
                let set: BTreeSet<_> = list.iter().copied().collect();
                let mut reach = BTreeSet::from([c]);
                let mut frontier = vec![c];
                while let Some(u) = frontier.pop() {
                    for w in g.neighbors(u) {
                        if set.contains(&w) && reach.insert(w) {
                            frontier.push(w);
                        }
                    }
                }
                assert_eq!(reach, set, "cluster of {c} disconnected");
                for &v in list {
                    assert!(d.dist_to_center[v] <= 2);
                }
            }
            // Min-degree-3 tree clusters leave at least s + 2 edges.
            for (&c, list) in &d.members {
                if d.kind[&c] == ClusterKind::TreeShaped
                    && list.iter().all(|&v| g.degree(v) >= 3)
                {
                    assert!(d.leaving_edges(c) >= list.len() + 2);
                }
            }
        }
    }

    #[test]
    fn centers_are_distance_k_separated() {
        let g = gen_random_regular(64, 3, 3, 7).unwrap();
        let d = cluster_decompose(&g, 2).unwrap();
        for &a in &d.centers {
            let dist = g.bfs_distances(a);
            for &b in &d.centers {
                if a != b {
                    assert!(dist[b] > 2);
                }
            }
        }
    }
}
