//! Maximal independent set from a proper coloring by greedy color-class
//! sweep; runs in at most (number of colors) rounds.

use crate::graph::{NodeIdx, PortedGraph};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MisError {
    #[error("coloring is not proper on this graph at edge ({0},{1})")]
    ImproperColoring(NodeIdx, NodeIdx),
}

/// Sweeps color classes in increasing order; within a class, nodes join the
/// set when no neighbor joined earlier. Ties inside a class cannot touch
/// because the coloring is proper. Node id breaks the processing order, so
/// the result is deterministic and replayable per node.
pub fn mis_from_coloring(g: &PortedGraph, colors: &[u32]) -> Result<Vec<bool>, MisError> {
    assert_eq!(colors.len(), g.node_count());
    for &(u, v, _, _) in &g.edges() {
        if colors[u] == colors[v] {
            return Err(MisError::ImproperColoring(u, v));
        }
    }
    let mut order: Vec<NodeIdx> = (0..g.node_count()).collect();
    order.sort_by_key(|&v| (colors[v], g.id_of(v)));
    let mut in_set = vec![false; g.node_count()];
    for v in order {
        if !g.neighbors(v).any(|w| in_set[w]) {
            in_set[v] = true;
        }
    }
    Ok(in_set)
}

/// Independence plus domination check; returns the first offending node.
pub fn verify_independent_dominating(g: &PortedGraph, in_set: &[bool]) -> Result<(), NodeIdx> {
    for v in 0..g.node_count() {
        if in_set[v] && g.neighbors(v).any(|w| in_set[w]) {
            return Err(v);
        }
        if !in_set[v] && !g.neighbors(v).any(|w| in_set[w]) {
            return Err(v);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen::build_from_edges;
    use crate::graph::{gen_random_regular, power_graph};
    use crate::local::logstar_coloring;
    use std::collections::BTreeSet;

    #[test]
    fn single_node_is_its_own_mis() {
        let g = build_from_edges(1, 2, &BTreeSet::new(), 0).unwrap();
        let s = mis_from_coloring(&g, &[0]).unwrap();
        assert_eq!(s, vec![true]);
    }

    #[test]
    fn c4_two_colored_takes_a_color_class() {
        let edges: BTreeSet<_> = [(0, 1), (1, 2), (2, 3), (0, 3)].into_iter().collect();
        let g = build_from_edges(4, 2, &edges, 0).unwrap();
        let s = mis_from_coloring(&g, &[0, 1, 0, 1]).unwrap();
        assert_eq!(s.iter().filter(|&&x| x).count(), 2);
        verify_independent_dominating(&g, &s).unwrap();
    }

    #[test]
    fn improper_coloring_rejected() {
        let edges: BTreeSet<_> = [(0, 1)].into_iter().collect();
        let g = build_from_edges(2, 2, &edges, 0).unwrap();
        assert!(mis_from_coloring(&g, &[0, 0]).is_err());
    }

    #[test]
    fn mis_on_power_graphs_of_random_regular() {
        for seed in 0..20u64 {
            let g = gen_random_regular(48, 3, 3, seed).unwrap();
            let gk = power_graph(&g, 2);
            let c = logstar_coloring(&g, 2, 48).unwrap();
            let s = mis_from_coloring(&gk, &c.colors).unwrap();
            verify_independent_dominating(&gk, &s).unwrap();
        }
    }
}
