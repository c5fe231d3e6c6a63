//! Proper H-labelings of edge-colored trees and the exact labeling count.

use super::IdGraph;
use crate::graph::{edge_key, NodeIdx, PortedGraph};
use crate::rng::Cursor;
use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelingError {
    #[error("input graph is not a tree")]
    NotATree,
    #[error("edge ({0},{1}) has no color or a color outside [Delta]")]
    BadEdgeColor(NodeIdx, NodeIdx),
    #[error("no injective proper labeling exists for this tree and ID graph")]
    Infeasible,
}

fn edge_layer(t: &PortedGraph, h: &IdGraph, u: NodeIdx, v: NodeIdx) -> Result<usize, LabelingError> {
    match t.edge_color(u, v) {
        Some(c) if (1..=h.delta as u32).contains(&c) => Ok(c as usize - 1),
        _ => Err(LabelingError::BadEdgeColor(u, v)),
    }
}

/// Assigns an ID-graph vertex to every tree node so that the endpoints of
/// each color-c edge are adjacent in layer H_c, injectively. Backtracking
/// with seed-rotated candidate orders: the root draws any vertex, children
/// draw neighbors of their parent's label in the connecting edge's layer.
pub fn proper_h_labeling(
    t: &PortedGraph,
    h: &IdGraph,
    seed: u64,
) -> Result<Vec<usize>, LabelingError> {
    if !t.is_acyclic() || !t.is_connected() {
        return Err(LabelingError::NotATree);
    }
    let n = t.node_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    // BFS order from node 0; parents precede children.
    let mut order = vec![0usize];
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut qh = 0;
    while qh < order.len() {
        let u = order[qh];
        qh += 1;
        for w in t.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                order.push(w);
            }
        }
    }
    // Validate colors up front.
    for &(u, v, _, _) in &t.edges() {
        edge_layer(t, h, u, v)?;
    }
    let mut cur = Cursor::new(seed, 0x686c_6162);
    let rot_root = cur.below(h.n_v as u64) as usize;
    let rotations: Vec<usize> =
        (0..n).map(|_| cur.next_u64() as usize).collect();

    let mut labels = vec![usize::MAX; n];
    let mut used = vec![false; h.n_v];
    fn assign(
        t: &PortedGraph,
        h: &IdGraph,
        order: &[usize],
        parent: &[usize],
        rotations: &[usize],
        rot_root: usize,
        depth: usize,
        labels: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let v = order[depth];
        let candidates: Vec<usize> = if parent[v] == usize::MAX {
            (0..h.n_v).map(|i| (i + rot_root) % h.n_v).collect()
        } else {
            let p = parent[v];
            let layer = edge_layer(t, h, p, v).expect("validated");
            let nbrs: Vec<usize> = h.layers[layer][labels[p]].iter().copied().collect();
            if nbrs.is_empty() {
                return false;
            }
            let r = rotations[depth] % nbrs.len();
            (0..nbrs.len()).map(|i| nbrs[(i + r) % nbrs.len()]).collect()
        };
        for cand in candidates {
            if used[cand] {
                continue;
            }
            labels[v] = cand;
            used[cand] = true;
            if assign(t, h, order, parent, rotations, rot_root, depth + 1, labels, used) {
                return true;
            }
            used[cand] = false;
            labels[v] = usize::MAX;
        }
        false
    }
    if assign(t, h, &order, &parent, &rotations, rot_root, 0, &mut labels, &mut used) {
        Ok(labels)
    } else {
        Err(LabelingError::Infeasible)
    }
}

/// Validates layer adjacency on every edge plus injectivity.
pub fn verify_h_labeling(t: &PortedGraph, h: &IdGraph, labels: &[usize]) -> Result<(), String> {
    if labels.len() != t.node_count() {
        return Err("label count mismatch".into());
    }
    let mut seen = std::collections::BTreeSet::new();
    for (v, &l) in labels.iter().enumerate() {
        if l >= h.n_v {
            return Err(format!("label {l} of node {v} out of range"));
        }
        if !seen.insert(l) {
            return Err(format!("label {l} repeats"));
        }
    }
    for &(u, v, _, _) in &t.edges() {
        let layer = edge_layer(t, h, u, v).map_err(|e| e.to_string())?;
        if !h.layers[layer][labels[u]].contains(&labels[v]) {
            return Err(format!(
                "edge ({u},{v}) labels ({},{}) not adjacent in layer {}",
                labels[u],
                labels[v],
                layer + 1
            ));
        }
    }
    let _ = edge_key(0, 0);
    Ok(())
}

/// Exact number of proper H-labelings (layer-adjacency-respecting maps,
/// matching the counting lemma; injectivity is a consequence of girth at
/// paper scale and is not imposed here). Dynamic program over the tree:
/// each node carries a vector over V(H) of subtree labeling counts, child
/// vectors transferred through the connecting edge's layer adjacency.
pub fn count_h_labelings(t: &PortedGraph, h: &IdGraph) -> Result<BigUint, LabelingError> {
    if !t.is_acyclic() || !t.is_connected() {
        return Err(LabelingError::NotATree);
    }
    let n = t.node_count();
    if n == 0 {
        return Ok(BigUint::from(1u32));
    }
    for &(u, v, _, _) in &t.edges() {
        edge_layer(t, h, u, v)?;
    }
    // Post-order from root 0.
    let mut order = vec![0usize];
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut qh = 0;
    while qh < order.len() {
        let u = order[qh];
        qh += 1;
        for w in t.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                order.push(w);
            }
        }
    }
    let one = BigUint::from(1u32);
    let mut table: Vec<Vec<BigUint>> = vec![vec![one.clone(); h.n_v]; n];
    for &v in order.iter().rev() {
        for w in t.neighbors(v) {
            if parent[w] != v {
                continue;
            }
            let layer = edge_layer(t, h, v, w).expect("validated");
            // Transfer the child vector through the layer adjacency.
            for label in 0..h.n_v {
                let mut sum = BigUint::from(0u32);
                for &nl in &h.layers[layer][label] {
                    sum += &table[w][nl];
                }
                let cell = &table[v][label] * sum;
                table[v][label] = cell;
            }
        }
    }
    Ok(table[0].iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idgraph::sample_layers_unchecked;
    use crate::graph::gen_edge_colored_tree;
    use crate::graph::HalfEdgeTarget;
    use std::collections::BTreeMap;

    fn colored_path(colors: &[u32]) -> PortedGraph {
        // Path with given edge colors.
        let n = colors.len() + 1;
        let mut adjacency: Vec<Vec<HalfEdgeTarget>> = vec![Vec::new(); n];
        let mut map = BTreeMap::new();
        for (i, &c) in colors.iter().enumerate() {
            let pa = adjacency[i].len() + 1;
            adjacency[i].push(HalfEdgeTarget { port: pa, neighbor: i + 1, reciprocal_port: 1 });
            adjacency[i + 1].push(HalfEdgeTarget { port: 1, neighbor: i, reciprocal_port: pa });
            map.insert((i, i + 1), c);
        }
        PortedGraph::new(
            3,
            (1..=n as u64).collect(),
            adjacency,
            Some(map),
            None,
        )
        .unwrap()
    }

    #[test]
    fn single_node_counts_nv() {
        let h = IdGraph::from_edges(5, 2, 1, &[vec![(0, 1)], vec![(1, 2)]]).unwrap();
        let t = colored_path(&[]);
        assert_eq!(count_h_labelings(&t, &h).unwrap(), BigUint::from(5u32));
    }

    #[test]
    fn two_node_tree_single_edge_layer_counts_two() {
        let h = IdGraph::from_edges(4, 1, 1, &[vec![(0, 1)]]).unwrap();
        let t = colored_path(&[1]);
        assert_eq!(count_h_labelings(&t, &h).unwrap(), BigUint::from(2u32));
        let labels = proper_h_labeling(&t, &h, 3).unwrap();
        verify_h_labeling(&t, &h, &labels).unwrap();
        assert!(labels == vec![0, 1] || labels == vec![1, 0]);
    }

    /// Brute-force oracle: enumerate all |V(H)|^n maps.
    fn brute_force_count(t: &PortedGraph, h: &IdGraph) -> BigUint {
        let n = t.node_count();
        let mut count = BigUint::from(0u32);
        let mut labels = vec![0usize; n];
        loop {
            let ok = t.edges().iter().all(|&(u, v, _, _)| {
                let layer = t.edge_color(u, v).unwrap() as usize - 1;
                h.layers[layer][labels[u]].contains(&labels[v])
            });
            if ok {
                count += 1u32;
            }
            // Odometer.
            let mut i = 0;
            loop {
                if i == n {
                    return count;
                }
                labels[i] += 1;
                if labels[i] < h.n_v {
                    break;
                }
                labels[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn dp_matches_brute_force_on_small_corpus() {
        for seed in 0..6u64 {
            let h = sample_layers_unchecked(7, 3, 1, seed);
            for tree_seed in 0..4u64 {
                for n in [2usize, 4, 6] {
                    let t = gen_edge_colored_tree(n, 3, tree_seed).unwrap();
                    let fast = count_h_labelings(&t, &h).unwrap();
                    let slow = brute_force_count(&t, &h);
                    assert_eq!(fast, slow, "h seed {seed}, tree seed {tree_seed}, n {n}");
                }
            }
        }
    }

    #[test]
    fn labeling_of_16_node_tree_validates() {
        let h = sample_layers_unchecked(600, 3, 1, 5);
        let t = gen_edge_colored_tree(16, 3, 8).unwrap();
        let labels = proper_h_labeling(&t, &h, 4).unwrap();
        verify_h_labeling(&t, &h, &labels).unwrap();
    }

    #[test]
    fn count_upper_bound_is_assertable() {
        // count <= nV * (max layer degree)^(n-1): the 2^O(n) growth at the
        // level of the exact DP.
        let h = sample_layers_unchecked(60, 3, 1, 2);
        let maxdeg = (0..3)
            .flat_map(|i| (0..60).map(move |v| (i, v)))
            .map(|(i, v)| h.layer_degree(i, v))
            .max()
            .unwrap() as u64;
        for n in [4usize, 8, 12] {
            let t = gen_edge_colored_tree(n, 3, 1).unwrap();
            let count = count_h_labelings(&t, &h).unwrap();
            let bound = BigUint::from(60u32) * BigUint::from(maxdeg).pow(n as u32 - 1);
            assert!(count <= bound, "n={n}: {count} > {bound}");
        }
    }
}
