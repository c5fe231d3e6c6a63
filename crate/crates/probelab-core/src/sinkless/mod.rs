//! The sinkless-orientation pipeline: reduction to LLL, cluster
//! decomposition, contraction, and lifting, with an LCA query mode.

mod cluster;
mod solve;

pub use cluster::{cluster_decompose, ClusterDecomposition, ClusterKind, DecomposeError};
pub use solve::{
    solve_sinkless, solve_sinkless_query, SinklessConfig, SinklessError, SinklessQueryAnswer,
    SinklessSolver,
};

use crate::graph::PortedGraph;
use crate::lll::{Event, LllInstance, Variable};

/// Encodes the orientation of edge (u, v) with u < v: value 0 orients
/// low -> high, value 1 orients high -> low.
pub fn edge_var_id(n: usize, u: usize, v: usize) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    (a * n + b) as u64
}

/// Sinkless orientation as a distributed LLL instance: one fair binary
/// variable per edge, one event per node of degree >= `min_deg` saying
/// "all incident edges point inward". Event probability is exactly
/// 2^-deg(v).
pub fn so_as_lll(g: &PortedGraph, min_deg: usize) -> LllInstance {
    let n = g.node_count();
    let mut variables = Vec::new();
    for (u, v, _, _) in g.edges() {
        variables.push(Variable { id: edge_var_id(n, u, v), domain: 2 });
    }
    let mut events = Vec::new();
    for v in 0..n {
        if g.degree(v) < min_deg {
            continue;
        }
        let mut vbl = Vec::new();
        let mut inward = Vec::new();
        let mut ports: Vec<usize> = g.neighbors(v).collect();
        ports.sort_unstable();
        for u in ports {
            vbl.push(edge_var_id(n, v, u));
            // Inward at v: toward v. Edge key is (min, max); value 0 points
            // low -> high.
            inward.push(if u < v { 0 } else { 1 });
        }
        events.push(Event { id: v as u64, vbl, bad: vec![inward] });
    }
    LllInstance::new(variables, events).expect("sinkless reduction is well-formed")
}

/// Reads an orientation value back as "does the edge point out of `v`".
pub fn oriented_out_of(n: usize, u: usize, v: usize, value: u32) -> bool {
    // value 0: low -> high.
    let _ = n;
    if u < v {
        value == 0
    } else {
        value == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen::build_from_edges;
    use crate::lll::{check_criterion, event_probability, CriterionKind, Frac, PartialAssignment};
    use std::collections::BTreeSet;

    fn cycle(n: usize) -> PortedGraph {
        let mut edges: BTreeSet<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        edges.insert((0, n - 1));
        build_from_edges(n, 2, &edges, 1).unwrap()
    }

    fn k4() -> PortedGraph {
        let edges: BTreeSet<_> =
            [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)].into_iter().collect();
        build_from_edges(4, 3, &edges, 0).unwrap()
    }

    #[test]
    fn c5_has_variables_but_no_events() {
        let inst = so_as_lll(&cycle(5), 3);
        assert_eq!(inst.variables().len(), 5);
        assert_eq!(inst.events().len(), 0);
    }

    #[test]
    fn k4_reduction_counts() {
        let inst = so_as_lll(&k4(), 3);
        assert_eq!(inst.variables().len(), 6);
        assert_eq!(inst.events().len(), 4);
        for e in inst.events() {
            let p = event_probability(&inst, e.id, &PartialAssignment::default()).unwrap();
            assert_eq!(p, Frac::new(1, 8));
        }
        // Every pair of K4 nodes shares an edge: dependency degree 3, and
        // the exponential criterion is tight: p 2^d = 1.
        assert_eq!(inst.dependency_degree(), 3);
        assert!(check_criterion(&inst, CriterionKind::Exponential).holds);
    }

    #[test]
    fn three_regular_dependency_degree_matches_brute_force() {
        let g = crate::graph::gen_random_regular(32, 3, 4, 3).unwrap();
        let inst = so_as_lll(&g, 3);
        // Brute force: two events depend iff the nodes share an edge.
        let mut expected = 0;
        for v in 0..g.node_count() {
            let d = g.neighbors(v).filter(|&u| g.degree(u) >= 3).count();
            expected = expected.max(d);
        }
        assert_eq!(inst.dependency_degree(), expected);
        assert_eq!(expected, 3);
        assert!(check_criterion(&inst, CriterionKind::Exponential).holds);
    }
}
