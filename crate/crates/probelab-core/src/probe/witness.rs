//! Failure-witness extraction: the induced subgraph a set of transcripts
//! actually depends on.

use super::{ProbeTranscript, QueryTarget};
use crate::graph::{NodeIdx, PortedGraph};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("transcript references id {0} not present in this graph")]
    ForeignId(u64),
    #[error("transcript step does not replay on this graph at id {0} port {1}")]
    Mismatch(u64, usize),
}

/// Induced subgraph on `S ∪ N(S)` where `S` is the union of the query nodes
/// and every probed node, preserving original ids, port numbers, colors, and
/// labels. Rerunning the same algorithms on the witness reproduces the
/// transcripts step for step, because every probed node keeps its full port
/// list.
pub fn extract_witness(
    transcripts: &[ProbeTranscript],
    g: &PortedGraph,
) -> Result<PortedGraph, WitnessError> {
    let mut s: BTreeSet<NodeIdx> = BTreeSet::new();
    for t in transcripts {
        let owner = match t.query {
            QueryTarget::Node(id) | QueryTarget::HalfEdge(id, _) => id,
        };
        s.insert(g.index_of_id(owner).ok_or(WitnessError::ForeignId(owner))?);
        for step in &t.steps {
            let v = g.index_of_id(step.probed_id).ok_or(WitnessError::ForeignId(step.probed_id))?;
            // Cheap consistency check that the transcript came from this graph.
            match g.port_target(v, step.port) {
                Some(tgt) if g.id_of(tgt.neighbor) == step.answer.neighbor_id => {}
                _ => return Err(WitnessError::Mismatch(step.probed_id, step.port)),
            }
            s.insert(v);
        }
    }
    let mut keep = s.clone();
    for &v in &s {
        for w in g.neighbors(v) {
            keep.insert(w);
        }
    }
    let keep: Vec<NodeIdx> = keep.into_iter().collect();
    let (witness, _) = g.induced_subgraph(&keep);
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_edge_colored_tree;
    use crate::probe::{run_query, ModelConfig, ProbeAlgorithm, QueryCtx, QueryFailure};

    struct NoProbe;
    impl ProbeAlgorithm for NoProbe {
        fn name(&self) -> &str {
            "none"
        }
        fn output_alphabet(&self) -> Vec<String> {
            vec!["ok".into()]
        }
        fn run(&self, _: &mut QueryCtx<'_>) -> Result<String, QueryFailure> {
            Ok("ok".into())
        }
    }

    #[test]
    fn empty_transcript_gives_closed_neighborhood() {
        let g = gen_edge_colored_tree(16, 3, 2).unwrap();
        let cfg = ModelConfig::lca(16, 0);
        let v = 5;
        let (_, t) = run_query(&NoProbe, &g, super::QueryTarget::Node(g.id_of(v)), &cfg);
        let w = extract_witness(&[t], &g).unwrap();
        assert_eq!(w.node_count(), 1 + g.degree(v));
        assert!(w.index_of_id(g.id_of(v)).is_some());
        for nb in g.neighbors(v) {
            assert!(w.index_of_id(g.id_of(nb)).is_some());
        }
    }

    #[test]
    fn foreign_transcript_rejected() {
        let g1 = gen_edge_colored_tree(16, 3, 2).unwrap();
        let g2 = gen_edge_colored_tree(4, 3, 9).unwrap();
        let cfg = ModelConfig::lca(16, 0);
        let (_, t) = run_query(&NoProbe, &g1, super::QueryTarget::Node(g1.id_of(15)), &cfg);
        // Node ids 1..=4 exist in g2, larger ones do not.
        if g2.index_of_id(t.query.owner()).is_none() {
            assert!(extract_witness(&[t], &g2).is_err());
        }
    }
}
