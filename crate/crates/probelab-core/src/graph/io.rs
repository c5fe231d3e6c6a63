//! Graph and labeling file formats.
//!
//! Self-describing JSON with a fixed key order and sorted collections, so a
//! parse/serialize round trip is byte-identical.

use super::{HalfEdgeLabeling, HalfEdgeTarget, NodeId, PortedGraph};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid graph: {0}")]
    Graph(#[from] super::GraphError),
    #[error("invalid file: {0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    version: u32,
    n: usize,
    delta: usize,
    ids: Vec<NodeId>,
    adjacency: Vec<Vec<(usize, usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edge_colors: Option<Vec<(usize, usize, u32)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input_labels: Option<Vec<(usize, usize, String)>>,
}

pub fn graph_to_json(g: &PortedGraph) -> String {
    let file = GraphFile {
        version: 1,
        n: g.node_count(),
        delta: g.delta(),
        ids: g.ids().to_vec(),
        adjacency: (0..g.node_count())
            .map(|v| g.ports(v).iter().map(|t| (t.port, t.neighbor, t.reciprocal_port)).collect())
            .collect(),
        edge_colors: g
            .edge_colors()
            .map(|m| m.iter().map(|(&(u, v), &c)| (u, v, c)).collect()),
        input_labels: g
            .input_labels()
            .map(|m| m.iter().map(|(&(v, p), s)| (v, p, s.clone())).collect()),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("graph serializes");
    s.push('\n');
    s
}

pub fn graph_from_json(text: &str) -> Result<PortedGraph, FormatError> {
    let file: GraphFile = serde_json::from_str(text)?;
    if file.version != 1 {
        return Err(FormatError::Invalid(format!("unsupported version {}", file.version)));
    }
    if file.ids.len() != file.n || file.adjacency.len() != file.n {
        return Err(FormatError::Invalid(format!(
            "n={} but {} ids and {} adjacency rows",
            file.n,
            file.ids.len(),
            file.adjacency.len()
        )));
    }
    let adjacency = file
        .adjacency
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|(port, neighbor, reciprocal_port)| HalfEdgeTarget {
                    port,
                    neighbor,
                    reciprocal_port,
                })
                .collect()
        })
        .collect();
    let edge_colors = file
        .edge_colors
        .map(|v| v.into_iter().map(|(u, w, c)| (super::edge_key(u, w), c)).collect());
    let input_labels =
        file.input_labels.map(|v| v.into_iter().map(|(n, p, s)| ((n, p), s)).collect());
    Ok(PortedGraph::new(file.delta, file.ids, adjacency, edge_colors, input_labels)?)
}

#[derive(Serialize, Deserialize)]
struct LabelingFile {
    version: u32,
    alphabet: Vec<String>,
    labels: Vec<(usize, usize, String)>,
}

pub fn labeling_to_json(lab: &HalfEdgeLabeling) -> String {
    let file = LabelingFile {
        version: 1,
        alphabet: lab.alphabet.clone(),
        labels: lab.labels.iter().map(|(&(v, p), s)| (v, p, s.clone())).collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("labeling serializes");
    s.push('\n');
    s
}

pub fn labeling_from_json(text: &str) -> Result<HalfEdgeLabeling, FormatError> {
    let file: LabelingFile = serde_json::from_str(text)?;
    if file.version != 1 {
        return Err(FormatError::Invalid(format!("unsupported version {}", file.version)));
    }
    let mut lab = HalfEdgeLabeling::new(file.alphabet);
    for (v, p, s) in file.labels {
        lab.set(v, p, s);
    }
    Ok(lab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_edge_colored_tree;

    #[test]
    fn graph_round_trip_is_byte_identical() {
        let g = gen_edge_colored_tree(16, 3, 3).unwrap();
        let s1 = graph_to_json(&g);
        let g2 = graph_from_json(&s1).unwrap();
        let s2 = graph_to_json(&g2);
        assert_eq!(s1, s2);
    }

    #[test]
    fn labeling_round_trip() {
        let g = gen_edge_colored_tree(8, 3, 3).unwrap();
        let lab = HalfEdgeLabeling::from_edge_colors(&g).unwrap();
        let s1 = labeling_to_json(&lab);
        let lab2 = labeling_from_json(&s1).unwrap();
        assert_eq!(lab, lab2);
        assert_eq!(s1, labeling_to_json(&lab2));
    }

    #[test]
    fn truncated_file_reports_parse_error() {
        let g = gen_edge_colored_tree(8, 3, 3).unwrap();
        let s = graph_to_json(&g);
        let err = graph_from_json(&s[..s.len() / 2]).unwrap_err();
        assert!(matches!(err, FormatError::Parse(_)));
    }
}
