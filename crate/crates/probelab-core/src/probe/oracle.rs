//! Query execution: the oracle answers probes, enforces the model's
//! restrictions per step, and meters probe counts exactly.

use super::{
    FarProbes, ModelConfig, Outcome, ProbeAlgorithm, ProbeAnswer, ProbeStep, ProbeTranscript,
    QueryFailure, QueryTarget, Randomness,
};
use crate::graph::{NodeId, Port, PortedGraph};
use std::collections::BTreeSet;

/// Raw adjacency answer from a probe source, before model bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawAnswer {
    pub neighbor_id: NodeId,
    pub reciprocal_port: Port,
    pub edge_color: Option<u32>,
    pub label_here: Option<String>,
    pub label_there: Option<String>,
}

/// The local information of one node: its id, degree, and per-port input
/// (edge colors and half-edge labels).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawView {
    pub id: NodeId,
    pub degree: usize,
    pub ports: Vec<(Port, Option<u32>, Option<String>)>,
}

/// Anything the oracle can probe: a concrete graph or a lazily materialized
/// host. `&mut` lets lazy sources grow while answering.
pub trait ProbeSource {
    fn contains(&mut self, id: NodeId) -> bool;
    fn view(&mut self, id: NodeId) -> Option<RawView>;
    fn port_answer(&mut self, id: NodeId, port: Port) -> Option<RawAnswer>;
}

/// A plain graph as a probe source.
pub struct GraphSource<'g> {
    pub g: &'g PortedGraph,
}

impl ProbeSource for GraphSource<'_> {
    fn contains(&mut self, id: NodeId) -> bool {
        self.g.index_of_id(id).is_some()
    }

    fn view(&mut self, id: NodeId) -> Option<RawView> {
        let v = self.g.index_of_id(id)?;
        let ports = self
            .g
            .ports(v)
            .iter()
            .map(|t| {
                (
                    t.port,
                    self.g.edge_color(v, t.neighbor),
                    self.g.input_label(v, t.port).map(|s| s.to_string()),
                )
            })
            .collect();
        Some(RawView { id, degree: self.g.degree(v), ports })
    }

    fn port_answer(&mut self, id: NodeId, port: Port) -> Option<RawAnswer> {
        let v = self.g.index_of_id(id)?;
        let t = self.g.port_target(v, port)?;
        Some(RawAnswer {
            neighbor_id: self.g.id_of(t.neighbor),
            reciprocal_port: t.reciprocal_port,
            edge_color: self.g.edge_color(v, t.neighbor),
            label_here: self.g.input_label(v, t.port).map(|s| s.to_string()),
            label_there: self.g.input_label(t.neighbor, t.reciprocal_port).map(|s| s.to_string()),
        })
    }
}

/// Per-query oracle state handed to the algorithm. The query node's own view
/// is free; every `probe` is metered and checked against the model.
pub struct QueryCtx<'a> {
    source: &'a mut dyn ProbeSource,
    cfg: ModelConfig,
    query: QueryTarget,
    seen: BTreeSet<NodeId>,
    steps: Vec<ProbeStep>,
}

impl<'a> QueryCtx<'a> {
    pub fn cfg(&self) -> &ModelConfig {
        &self.cfg
    }

    pub fn advertised_n(&self) -> usize {
        self.cfg.advertised_n
    }

    pub fn query(&self) -> QueryTarget {
        self.query
    }

    pub fn probes_used(&self) -> usize {
        self.steps.len()
    }

    /// The queried node's own local information (free of charge).
    pub fn query_view(&mut self) -> RawView {
        self.source.view(self.query.owner()).expect("query node exists")
    }

    /// One oracle call. Enforces the probe budget, the VOLUME connectivity
    /// restriction, and port ranges.
    pub fn probe(&mut self, id: NodeId, port: Port) -> Result<ProbeAnswer, QueryFailure> {
        if let Some(budget) = self.cfg.probe_budget {
            if self.steps.len() >= budget {
                return Err(QueryFailure::ProbeBudgetExceeded { budget });
            }
        }
        if matches!(self.cfg.far_probes, FarProbes::Forbidden) && !self.seen.contains(&id) {
            return Err(QueryFailure::FarProbeViolation { id });
        }
        if !self.source.contains(id) {
            return Err(QueryFailure::UnknownId { id });
        }
        let degree = self.source.view(id).expect("probed node exists").degree;
        let raw = self
            .source
            .port_answer(id, port)
            .ok_or(QueryFailure::PortOutOfRange { id, port })?;
        self.seen.insert(id);
        self.seen.insert(raw.neighbor_id);
        let answer = ProbeAnswer {
            neighbor_id: raw.neighbor_id,
            probed_degree: degree,
            reciprocal_port: raw.reciprocal_port,
            edge_color: raw.edge_color,
            label_here: raw.label_here,
            label_there: raw.label_there,
            neighbor_rand_digest: self.cfg.rand_digest(raw.neighbor_id),
        };
        self.steps.push(ProbeStep { probed_id: id, port, answer: answer.clone() });
        Ok(answer)
    }

    /// Reads a word of a node's randomness tape. Under private randomness
    /// the node must have been seen; randomness reads are not probes.
    pub fn rand_word(&mut self, id: NodeId, idx: u64) -> Result<u64, QueryFailure> {
        if matches!(self.cfg.randomness, Randomness::Private(_)) && !self.seen.contains(&id) {
            return Err(QueryFailure::RandAccessViolation { id });
        }
        self.cfg
            .private_randomness(id)
            .map(|s| s.word(idx))
            .ok_or_else(|| QueryFailure::Inconsistent("randomness disabled".into()))
    }
}

/// Runs one query over an arbitrary probe source.
pub fn run_query_on_source(
    alg: &dyn ProbeAlgorithm,
    source: &mut dyn ProbeSource,
    query: QueryTarget,
    cfg: &ModelConfig,
) -> (Outcome, ProbeTranscript) {
    cfg.validate().expect("valid model config");
    assert!(source.contains(query.owner()), "query node must exist");
    let mut ctx = QueryCtx {
        source,
        cfg: *cfg,
        query,
        seen: BTreeSet::from([query.owner()]),
        steps: Vec::new(),
    };
    let alphabet = alg.output_alphabet();
    let outcome = match alg.run(&mut ctx) {
        Ok(sym) => {
            if alphabet.iter().any(|a| *a == sym) {
                Outcome::Output(sym)
            } else {
                Outcome::Failed(QueryFailure::Inconsistent(format!(
                    "algorithm {} emitted {sym:?} outside its declared alphabet",
                    alg.name()
                )))
            }
        }
        Err(f) => Outcome::Failed(f),
    };
    let transcript = ProbeTranscript { query, steps: ctx.steps, outcome: outcome.clone() };
    (outcome, transcript)
}

/// Runs one query against a concrete graph.
pub fn run_query(
    alg: &dyn ProbeAlgorithm,
    g: &PortedGraph,
    query: QueryTarget,
    cfg: &ModelConfig,
) -> (Outcome, ProbeTranscript) {
    let mut source = GraphSource { g };
    run_query_on_source(alg, &mut source, query, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_edge_colored_tree;

    struct ConstantAlg;
    impl ProbeAlgorithm for ConstantAlg {
        fn name(&self) -> &str {
            "constant"
        }
        fn output_alphabet(&self) -> Vec<String> {
            vec!["1".into()]
        }
        fn run(&self, _ctx: &mut QueryCtx<'_>) -> Result<String, QueryFailure> {
            Ok("1".into())
        }
    }

    struct FarProbeAlg;
    impl ProbeAlgorithm for FarProbeAlg {
        fn name(&self) -> &str {
            "far"
        }
        fn output_alphabet(&self) -> Vec<String> {
            vec!["x".into()]
        }
        fn run(&self, ctx: &mut QueryCtx<'_>) -> Result<String, QueryFailure> {
            // Probes an id that was never returned to it.
            let me = ctx.query().owner();
            let other = if me == 1 { 2 } else { 1 };
            ctx.probe(other, 1)?;
            Ok("x".into())
        }
    }

    #[test]
    fn zero_probe_constant() {
        let g = gen_edge_colored_tree(8, 3, 1).unwrap();
        let cfg = ModelConfig::lca(8, 0);
        let (out, t) = run_query(&ConstantAlg, &g, QueryTarget::Node(g.id_of(0)), &cfg);
        assert_eq!(out, Outcome::Output("1".into()));
        assert_eq!(t.probe_count(), 0);
    }

    #[test]
    fn volume_far_probe_fails() {
        let g = gen_edge_colored_tree(8, 3, 1).unwrap();
        let cfg = ModelConfig::volume(8, 0);
        let (out, _) = run_query(&FarProbeAlg, &g, QueryTarget::Node(g.id_of(0)), &cfg);
        assert!(matches!(out, Outcome::Failed(QueryFailure::FarProbeViolation { .. })));
    }

    #[test]
    fn lca_far_probe_allowed() {
        let g = gen_edge_colored_tree(8, 3, 1).unwrap();
        let cfg = ModelConfig::lca(8, 0);
        let (out, t) = run_query(&FarProbeAlg, &g, QueryTarget::Node(g.id_of(0)), &cfg);
        assert_eq!(out, Outcome::Output("x".into()));
        assert_eq!(t.probe_count(), 1);
    }

    #[test]
    fn budget_enforced() {
        let g = gen_edge_colored_tree(8, 3, 1).unwrap();
        let cfg = ModelConfig::lca(8, 0).with_budget(0);
        let (out, _) = run_query(&FarProbeAlg, &g, QueryTarget::Node(g.id_of(0)), &cfg);
        assert!(matches!(out, Outcome::Failed(QueryFailure::ProbeBudgetExceeded { budget: 0 })));
    }
}
