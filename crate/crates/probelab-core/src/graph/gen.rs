//! Seeded instance generators.

use super::{edge_key, GraphError, HalfEdgeTarget, NodeIdx, PortedGraph};
use crate::rng::Cursor;
use std::collections::{BTreeMap, BTreeSet};

/// Random tree with maximum degree at most `delta`, properly edge-colored
/// with colors from `[delta]` greedily in construction (BFS) order. Node ids
/// are a seeded permutation of `1..=n`.
pub fn gen_edge_colored_tree(n: usize, delta: usize, seed: u64) -> Result<PortedGraph, GraphError> {
    if n < 1 || delta < 2 {
        return Err(GraphError::Infeasible(format!(
            "gen_edge_colored_tree requires n >= 1 and delta >= 2, got n={n} delta={delta}"
        )));
    }
    let mut cur = Cursor::new(seed, 0x7265_65);
    let mut adjacency: Vec<Vec<HalfEdgeTarget>> = vec![Vec::new(); n];
    let mut colors: BTreeMap<(NodeIdx, NodeIdx), u32> = BTreeMap::new();
    let mut open: Vec<NodeIdx> = vec![0]; // nodes with degree < delta
    for v in 1..n {
        let pick = cur.below(open.len() as u64) as usize;
        let parent = open[pick];
        // Smallest color free at the parent; the child has no edges yet, so
        // delta colors always suffice on a tree.
        let used: BTreeSet<u32> = adjacency[parent]
            .iter()
            .map(|t| colors[&edge_key(parent, t.neighbor)])
            .collect();
        let color = (1..=delta as u32).find(|c| !used.contains(c)).expect("free color on tree");
        let p_port = adjacency[parent].len() + 1;
        let v_port = 1;
        adjacency[parent].push(HalfEdgeTarget { port: p_port, neighbor: v, reciprocal_port: v_port });
        adjacency[v].push(HalfEdgeTarget { port: v_port, neighbor: parent, reciprocal_port: p_port });
        colors.insert(edge_key(parent, v), color);
        if adjacency[parent].len() == delta {
            open.remove(pick);
        }
        if adjacency[v].len() < delta {
            open.push(v);
        }
        if open.is_empty() && v + 1 < n {
            return Err(GraphError::Infeasible(format!(
                "tree generation saturated all degrees at {} of {} nodes",
                v + 1,
                n
            )));
        }
    }
    let ids = seeded_id_permutation(n, seed);
    PortedGraph::new(delta, ids, adjacency, Some(colors), None)
}

fn seeded_id_permutation(n: usize, seed: u64) -> Vec<u64> {
    let mut ids: Vec<u64> = (1..=n as u64).collect();
    Cursor::new(seed, 0x6964_73).shuffle(&mut ids);
    ids
}

/// Random `delta`-regular graph by the pairing model with switch repair of
/// loops and parallel edges, then girth boosting: while a cycle shorter than
/// `girth_target` exists, the lexicographically smallest edge of the first
/// cycle found in BFS sweep order is deleted. Fails if boosting would delete
/// more than `n/4` edges.
pub fn gen_random_regular(
    n: usize,
    delta: usize,
    girth_target: usize,
    seed: u64,
) -> Result<PortedGraph, GraphError> {
    if n * delta % 2 != 0 {
        return Err(GraphError::Infeasible(format!(
            "n*delta must be even, got n={n} delta={delta}"
        )));
    }
    if girth_target < 3 {
        return Err(GraphError::Infeasible(format!(
            "girth_target must be >= 3, got {girth_target}"
        )));
    }
    if n <= delta {
        return Err(GraphError::Infeasible(format!(
            "a simple {delta}-regular graph needs more than {delta} nodes, got {n}"
        )));
    }
    let mut cur = Cursor::new(seed, 0x7061_6972);

    // Pairing model: shuffle the nΔ stubs and pair them up, then repair
    // loops/multi-edges by switching with uniformly chosen partner pairs.
    let mut stubs: Vec<NodeIdx> = (0..n).flat_map(|v| std::iter::repeat(v).take(delta)).collect();
    cur.shuffle(&mut stubs);
    let half = stubs.len() / 2;
    type Dealt = (Vec<(NodeIdx, NodeIdx)>, BTreeSet<(NodeIdx, NodeIdx)>, Vec<usize>);
    let deal = |stubs: &[NodeIdx]| -> Dealt {
        let pairs: Vec<(NodeIdx, NodeIdx)> =
            (0..half).map(|i| (stubs[2 * i], stubs[2 * i + 1])).collect();
        let mut edge_set = BTreeSet::new();
        let mut bad = Vec::new();
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if a == b || !edge_set.insert(edge_key(a, b)) {
                bad.push(i);
            }
        }
        (pairs, edge_set, bad)
    };
    let (mut pairs, mut edge_set, mut bad) = deal(&stubs);
    let mut attempts = 0u64;
    let mut stalled = 0u64;
    while let Some(&i) = bad.last() {
        attempts += 1;
        stalled += 1;
        if attempts > 400_000 {
            return Err(GraphError::Infeasible(format!(
                "pairing repair did not converge for n={n} delta={delta}"
            )));
        }
        // Switch repair can lock up on tiny instances; reshuffle from scratch.
        if stalled > 200 * (half as u64 + 1) {
            stalled = 0;
            cur.shuffle(&mut stubs);
            let fresh = deal(&stubs);
            pairs = fresh.0;
            edge_set = fresh.1;
            bad = fresh.2;
            continue;
        }
        let (a, b) = pairs[i];
        // A previously conflicting pair may have become free after other
        // switches.
        if a != b && edge_set.insert(edge_key(a, b)) {
            bad.pop();
            continue;
        }
        let j = cur.below(half as u64) as usize;
        if j == i {
            continue;
        }
        let (c, d) = pairs[j];
        let j_is_good = !bad.contains(&j);
        if j_is_good {
            edge_set.remove(&edge_key(c, d));
        }
        // Try both switch orientations.
        let mut done = false;
        for (x, y) in [((a, c), (b, d)), ((a, d), (b, c))] {
            let ((a1, c1), (b1, d1)) = (x, y);
            if a1 == c1 || b1 == d1 || edge_key(a1, c1) == edge_key(b1, d1) {
                continue;
            }
            if edge_set.contains(&edge_key(a1, c1)) || edge_set.contains(&edge_key(b1, d1)) {
                continue;
            }
            edge_set.insert(edge_key(a1, c1));
            edge_set.insert(edge_key(b1, d1));
            pairs[i] = (a1, c1);
            pairs[j] = (b1, d1);
            done = true;
            break;
        }
        if !done {
            if j_is_good {
                edge_set.insert(edge_key(c, d));
            }
            continue;
        }
        bad.pop();
        if !j_is_good {
            bad.retain(|&x| x != j);
        }
    }

    // Girth boosting.
    let mut edges: BTreeSet<(NodeIdx, NodeIdx)> = edge_set;
    let budget = n / 4;
    let mut deleted = 0;
    while let Some(cycle) = find_short_cycle(n, &edges, girth_target) {
        let victim = *cycle.iter().min().expect("cycle has edges");
        edges.remove(&victim);
        deleted += 1;
        if deleted > budget {
            return Err(GraphError::Infeasible(format!(
                "girth boosting to {girth_target} deleted more than n/4 = {budget} edges \
                 (n={n}, delta={delta}); parameters infeasible"
            )));
        }
    }

    build_from_edges(n, delta, &edges, seed)
}

/// Assembles a validated graph from an edge set; ports follow sorted
/// neighbor order.
pub fn build_from_edges(
    n: usize,
    delta: usize,
    edges: &BTreeSet<(NodeIdx, NodeIdx)>,
    seed: u64,
) -> Result<PortedGraph, GraphError> {
    let mut nbrs: Vec<Vec<NodeIdx>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        nbrs[u].push(v);
        nbrs[v].push(u);
    }
    for l in nbrs.iter_mut() {
        l.sort_unstable();
    }
    let port_of = |v: NodeIdx, w: NodeIdx| nbrs[v].binary_search(&w).unwrap() + 1;
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
    let ids = seeded_id_permutation(n, seed);
    PortedGraph::new(delta, ids, adjacency, None, None)
}

/// First cycle shorter than `target` in BFS sweep order, as its edge list.
fn find_short_cycle(
    n: usize,
    edges: &BTreeSet<(NodeIdx, NodeIdx)>,
    target: usize,
) -> Option<Vec<(NodeIdx, NodeIdx)>> {
    let mut adj: Vec<Vec<NodeIdx>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        dist[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            if dist[u] * 2 >= target {
                continue;
            }
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w && parent[w] != u {
                    // Walk both endpoints to their common ancestor.
                    let (mut pu, mut pw) = (u, w);
                    let mut path_u = vec![pu];
                    let mut path_w = vec![pw];
                    while dist[pu] > dist[pw] {
                        pu = parent[pu];
                        path_u.push(pu);
                    }
                    while dist[pw] > dist[pu] {
                        pw = parent[pw];
                        path_w.push(pw);
                    }
                    while pu != pw {
                        pu = parent[pu];
                        pw = parent[pw];
                        path_u.push(pu);
                        path_w.push(pw);
                    }
                    let len = (path_u.len() - 1) + (path_w.len() - 1) + 1;
                    if len < target {
                        let mut cyc = Vec::new();
                        for win in path_u.windows(2) {
                            cyc.push(edge_key(win[0], win[1]));
                        }
                        for win in path_w.windows(2) {
                            cyc.push(edge_key(win[0], win[1]));
                        }
                        cyc.push(edge_key(u, w));
                        return Some(cyc);
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_tree() {
        let g = gen_edge_colored_tree(1, 3, 5).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn two_node_tree_has_one_colored_edge() {
        let g = gen_edge_colored_tree(2, 3, 5).unwrap();
        assert_eq!(g.edge_count(), 1);
        let c = g.edge_color(0, 1).unwrap();
        assert!((1..=3).contains(&c));
    }

    #[test]
    fn tree_is_deterministic_and_acyclic() {
        let a = gen_edge_colored_tree(32, 3, 7).unwrap();
        let b = gen_edge_colored_tree(32, 3, 7).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_eq!(a.ids(), b.ids());
        assert!(a.is_acyclic());
        assert!(a.is_connected());
        assert!(a.max_degree() <= 3);
    }

    #[test]
    fn k4_from_pairing() {
        let g = gen_random_regular(4, 3, 3, 11).unwrap();
        assert_eq!(g.edge_count(), 6);
        for v in 0..4 {
            assert_eq!(g.degree(v), 3);
        }
    }

    #[test]
    fn odd_stub_count_rejected() {
        let err = gen_random_regular(5, 3, 3, 1).unwrap_err();
        assert!(matches!(err, GraphError::Infeasible(_)));
    }

    #[test]
    fn girth_boosting_reaches_target() {
        let g = gen_random_regular(100, 3, 9, 1).unwrap();
        assert!(g.girth().map_or(true, |x| x >= 9), "girth {:?}", g.girth());
    }

    #[test]
    fn regular_generator_is_deterministic() {
        let a = gen_random_regular(64, 4, 3, 9).unwrap();
        let b = gen_random_regular(64, 4, 3, 9).unwrap();
        assert_eq!(a.edges(), b.edges());
    }
}
