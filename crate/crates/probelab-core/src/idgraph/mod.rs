//! ID graphs: layered constraint graphs over an identifier space, their
//! probabilistic construction, property verification, proper labelings of
//! edge-colored trees, and the zero-round / round-elimination checks.

mod build;
mod elimination;
mod labeling;
mod verify;
mod zeroround;

pub use build::{build_id_graph, sample_layers_unchecked, BuildError};
pub use elimination::{
    eliminate_edge_to_vertex, eliminate_vertex_to_edge, EdgeTable, EliminationError, VertexTable1,
    ZeroRoundMap,
};
pub use labeling::{count_h_labelings, proper_h_labeling, verify_h_labeling, LabelingError};
pub use verify::{exact_max_independent_set, verify_id_graph, PropertyReport, PropertyStatus};
pub use zeroround::{zero_round_so_exists, Impossibility, ZeroRound};

use std::collections::BTreeSet;
use thiserror::Error;

/// Delta layer graphs H_1..H_Delta on a common vertex set 0..n_v. Vertex v's
/// neighbors in layer i are `layers[i][v]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdGraph {
    pub n_v: usize,
    pub delta: usize,
    pub r: usize,
    pub layers: Vec<Vec<BTreeSet<usize>>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdGraphError {
    #[error("layer count {0} does not match delta {1}")]
    LayerCount(usize, usize),
    #[error("vertex {0} out of range in layer {1}")]
    VertexRange(usize, usize),
    #[error("self loop at vertex {0} in layer {1}")]
    SelfLoop(usize, usize),
    #[error("asymmetric adjacency at ({0},{1}) in layer {2}")]
    Asymmetric(usize, usize, usize),
    #[error("parse error at line {0}: {1}")]
    Parse(usize, String),
}

impl IdGraph {
    pub fn new(
        n_v: usize,
        delta: usize,
        r: usize,
        layers: Vec<Vec<BTreeSet<usize>>>,
    ) -> Result<Self, IdGraphError> {
        if layers.len() != delta {
            return Err(IdGraphError::LayerCount(layers.len(), delta));
        }
        for (i, layer) in layers.iter().enumerate() {
            assert_eq!(layer.len(), n_v, "layer {i} vertex count");
            for (v, nbrs) in layer.iter().enumerate() {
                for &w in nbrs {
                    if w >= n_v {
                        return Err(IdGraphError::VertexRange(w, i));
                    }
                    if w == v {
                        return Err(IdGraphError::SelfLoop(v, i));
                    }
                    if !layer[w].contains(&v) {
                        return Err(IdGraphError::Asymmetric(v, w, i));
                    }
                }
            }
        }
        Ok(IdGraph { n_v, delta, r, layers })
    }

    /// Builds from per-layer edge lists.
    pub fn from_edges(
        n_v: usize,
        delta: usize,
        r: usize,
        edges: &[Vec<(usize, usize)>],
    ) -> Result<Self, IdGraphError> {
        let mut layers = vec![vec![BTreeSet::new(); n_v]; delta];
        for (i, list) in edges.iter().enumerate() {
            for &(u, v) in list {
                if u >= n_v || v >= n_v {
                    return Err(IdGraphError::VertexRange(u.max(v), i));
                }
                if u == v {
                    return Err(IdGraphError::SelfLoop(u, i));
                }
                layers[i][u].insert(v);
                layers[i][v].insert(u);
            }
        }
        IdGraph::new(n_v, delta, r, layers)
    }

    pub fn layer_degree(&self, layer: usize, v: usize) -> usize {
        self.layers[layer][v].len()
    }

    /// Edges of one layer, each once.
    pub fn layer_edges(&self, layer: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (v, nbrs) in self.layers[layer].iter().enumerate() {
            for &w in nbrs {
                if v < w {
                    out.push((v, w));
                }
            }
        }
        out
    }

    /// Union multigraph edges with multiplicity: (u, v, multiplicity).
    pub fn union_multi_edges(&self) -> Vec<(usize, usize, usize)> {
        let mut mult: std::collections::BTreeMap<(usize, usize), usize> = Default::default();
        for i in 0..self.delta {
            for (u, v) in self.layer_edges(i) {
                *mult.entry((u, v)).or_insert(0) += 1;
            }
        }
        mult.into_iter().map(|((u, v), m)| (u, v, m)).collect()
    }

    /// Text format: `idgraph <nV> <delta> <R>`, then per layer a `layer <i>`
    /// header followed by `u v` lines.
    pub fn to_text(&self) -> String {
        let mut s = format!("idgraph {} {} {}\n", self.n_v, self.delta, self.r);
        for i in 0..self.delta {
            s.push_str(&format!("layer {}\n", i + 1));
            for (u, v) in self.layer_edges(i) {
                s.push_str(&format!("{u} {v}\n"));
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, IdGraphError> {
        let mut lines = text.lines().enumerate();
        let (ln, header) = lines
            .next()
            .ok_or_else(|| IdGraphError::Parse(0, "empty file".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "idgraph" {
            return Err(IdGraphError::Parse(ln + 1, "expected `idgraph nV delta R`".into()));
        }
        let parse = |s: &str, ln: usize| {
            s.parse::<usize>().map_err(|e| IdGraphError::Parse(ln + 1, e.to_string()))
        };
        let n_v = parse(parts[1], ln)?;
        let delta = parse(parts[2], ln)?;
        let r = parse(parts[3], ln)?;
        let mut edges: Vec<Vec<(usize, usize)>> = Vec::new();
        for (ln, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("layer ") {
                let idx = parse(rest.trim(), ln)?;
                if idx != edges.len() + 1 {
                    return Err(IdGraphError::Parse(ln + 1, format!("layer {idx} out of order")));
                }
                edges.push(Vec::new());
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(IdGraphError::Parse(ln + 1, "expected `u v`".into()));
            }
            let u = parse(parts[0], ln)?;
            let v = parse(parts[1], ln)?;
            let layer = edges
                .last_mut()
                .ok_or_else(|| IdGraphError::Parse(ln + 1, "edge before any layer header".into()))?;
            layer.push((u, v));
        }
        while edges.len() < delta {
            edges.push(Vec::new());
        }
        IdGraph::from_edges(n_v, delta, r, &edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let h = IdGraph::from_edges(4, 2, 1, &[vec![(0, 1), (2, 3)], vec![(0, 2), (1, 3)]]).unwrap();
        let s = h.to_text();
        let h2 = IdGraph::from_text(&s).unwrap();
        assert_eq!(h, h2);
        assert_eq!(s, h2.to_text());
    }

    #[test]
    fn asymmetry_rejected() {
        let mut layers = vec![vec![BTreeSet::new(); 3]; 1];
        layers[0][0].insert(1);
        assert!(matches!(IdGraph::new(3, 1, 1, layers), Err(IdGraphError::Asymmetric(..))));
    }

    #[test]
    fn union_multiplicity_counts_layers() {
        let h = IdGraph::from_edges(3, 2, 1, &[vec![(0, 1)], vec![(0, 1), (1, 2)]]).unwrap();
        assert_eq!(h.union_multi_edges(), vec![(0, 1, 2), (1, 2, 1)]);
    }
}
