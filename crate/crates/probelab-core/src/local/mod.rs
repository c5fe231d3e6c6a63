//! LOCAL-model algorithms and the reductions turning them into probe
//! algorithms.

pub mod coloring;
mod lift;
mod mis;
mod parnas_ron;

pub use coloring::{logstar_coloring, ColoringError, LogstarColoring};
pub use lift::{BigIdAlgorithm, BigIdAnswer, BigIdCtx, LiftViaColoring};
pub use mis::{mis_from_coloring, verify_independent_dominating, MisError};
pub use parnas_ron::ParnasRon;

use crate::graph::{HalfEdgeLabeling, NodeId, NodeIdx, Port, PortedGraph};
use crate::probe::ModelConfig;

/// One port of a ball node. `neighbor` is a ball index and is present only
/// when the edge is materialized, i.e. at least one endpoint lies strictly
/// inside the horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallPort {
    pub port: Port,
    pub edge_color: Option<u32>,
    pub label_here: Option<String>,
    pub label_there: Option<String>,
    pub neighbor: Option<usize>,
    pub reciprocal_port: Option<Port>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallNode {
    pub id: NodeId,
    pub dist: usize,
    pub degree: usize,
    pub ports: Vec<BallPort>,
    pub rand_digest: u64,
}

/// Canonical rooted radius-t view: nodes in (distance, id) order, node 0 is
/// the root. Two isomorphic balls (matching ids, ports, labels) produce the
/// same struct, so any pure `decide` is automatically isomorphism-invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub radius: usize,
    pub nodes: Vec<BallNode>,
}

impl Ball {
    pub fn root(&self) -> &BallNode {
        &self.nodes[0]
    }

    /// Builds the ball directly from the graph (the global-simulation side).
    pub fn collect(g: &PortedGraph, root: NodeIdx, t: usize, cfg: &ModelConfig) -> Ball {
        let dist = g.bfs_distances(root);
        let mut members: Vec<NodeIdx> =
            (0..g.node_count()).filter(|&v| dist[v] <= t).collect();
        members.sort_by_key(|&v| (dist[v], g.id_of(v)));
        let index_of: std::collections::BTreeMap<NodeIdx, usize> =
            members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let nodes = members
            .iter()
            .map(|&v| {
                let ports = g
                    .ports(v)
                    .iter()
                    .map(|tg| {
                        let materialized = dist[v] < t
                            || dist.get(tg.neighbor).map_or(false, |&d| d < t);
                        let nb = if materialized { index_of.get(&tg.neighbor).copied() } else { None };
                        BallPort {
                            port: tg.port,
                            edge_color: g.edge_color(v, tg.neighbor),
                            label_here: g.input_label(v, tg.port).map(|s| s.to_string()),
                            label_there: if materialized {
                                g.input_label(tg.neighbor, tg.reciprocal_port).map(|s| s.to_string())
                            } else {
                                None
                            },
                            neighbor: nb,
                            reciprocal_port: if materialized { Some(tg.reciprocal_port) } else { None },
                        }
                    })
                    .collect();
                BallNode {
                    id: g.id_of(v),
                    dist: dist[v],
                    degree: g.degree(v),
                    ports,
                    rand_digest: cfg.rand_digest(g.id_of(v)),
                }
            })
            .collect();
        Ball { radius: t, nodes }
    }
}

/// A t-round LOCAL algorithm: a pure function from the root's radius-t ball
/// to the root's half-edge output symbols, in root port order.
pub trait LocalAlgorithm {
    fn name(&self) -> &str;
    fn radius(&self) -> usize;
    fn output_alphabet(&self) -> Vec<String>;
    fn decide(&self, ball: &Ball) -> Vec<String>;
}

/// Runs the LOCAL algorithm globally: one ball per node, decided
/// independently.
pub fn global_local_run(
    alg: &dyn LocalAlgorithm,
    g: &PortedGraph,
    cfg: &ModelConfig,
) -> HalfEdgeLabeling {
    let mut lab = HalfEdgeLabeling::new(alg.output_alphabet());
    for v in 0..g.node_count() {
        let ball = Ball::collect(g, v, alg.radius(), cfg);
        let out = alg.decide(&ball);
        assert_eq!(out.len(), g.degree(v), "decide returns one symbol per root half-edge");
        for (t, sym) in g.ports(v).iter().zip(out) {
            lab.set(v, t.port, sym);
        }
    }
    lab
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_edge_colored_tree;

    #[test]
    fn ball_is_canonical_and_bounded() {
        let g = gen_edge_colored_tree(32, 3, 5).unwrap();
        let cfg = ModelConfig::lca(32, 0);
        let b = Ball::collect(&g, 0, 2, &cfg);
        assert_eq!(b.root().dist, 0);
        for w in b.nodes.windows(2) {
            assert!((w[0].dist, w[0].id) < (w[1].dist, w[1].id));
        }
        for n in &b.nodes {
            assert!(n.dist <= 2);
            if n.dist < 2 {
                assert!(n.ports.iter().all(|p| p.neighbor.is_some()));
            }
        }
    }
}
