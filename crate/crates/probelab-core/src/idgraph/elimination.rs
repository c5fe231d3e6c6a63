//! One half-round elimination step at tiny parameters (Delta = 3, t <= 1).
//!
//! A 1-round vertex algorithm is a lookup table over radius-1 views
//! (own label plus one neighbor label per color). Eliminating half a round
//! yields an edge algorithm over radius-0 edge views (the two endpoint
//! labels and the edge color): orient u -> v when some H-consistent
//! extension of u's side makes the vertex algorithm send the half-edge out.
//! If both directions fire for some edge, the two extensions glue into a
//! counterexample against the vertex algorithm. Eliminating the remaining
//! half round yields a 0-round vertex map: a label picks a color whose
//! every layer-neighbor agrees to receive, and a label with no such color
//! is a sink witness.

use super::IdGraph;
use std::collections::BTreeMap;
use thiserror::Error;

pub const ELIM_DELTA: usize = 3;
pub const ELIM_MAX_NV: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EliminationError {
    #[error("elimination supports Delta = 3, got {0}")]
    UnsupportedDelta(usize),
    #[error("table sizes explode above nV = {ELIM_MAX_NV}, got {0}")]
    TableTooLarge(usize),
    #[error("missing table entry for view {0:?}")]
    MissingEntry(String),
}

/// Radius-1 vertex view: own label plus the neighbor label seen through
/// each color. Valid views have `nbr[c]` adjacent to `label` in layer c+1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct VertexView1 {
    pub label: usize,
    pub nbr: [usize; ELIM_DELTA],
}

/// 1-round vertex table: per view, which half-edges (by color) point out.
#[derive(Debug, Clone, Default)]
pub struct VertexTable1 {
    pub out: BTreeMap<VertexView1, [bool; ELIM_DELTA]>,
}

impl VertexTable1 {
    /// Fills the table over all valid views of `h` from a decision rule.
    pub fn from_fn(h: &IdGraph, f: impl Fn(&VertexView1) -> [bool; ELIM_DELTA]) -> Self {
        let mut out = BTreeMap::new();
        for label in 0..h.n_v {
            let per_color: Vec<Vec<usize>> =
                (0..ELIM_DELTA).map(|c| h.layers[c][label].iter().copied().collect()).collect();
            if per_color.iter().any(|v| v.is_empty()) {
                // A label missing a layer neighbor never occurs on a
                // properly edge-colored Delta-regular tree.
                continue;
            }
            for &a in &per_color[0] {
                for &b in &per_color[1] {
                    for &c in &per_color[2] {
                        let view = VertexView1 { label, nbr: [a, b, c] };
                        let bits = f(&view);
                        out.insert(view, bits);
                    }
                }
            }
        }
        VertexTable1 { out }
    }
}

/// Radius-0 edge table: for each layer-c edge, does it point from the
/// smaller label to the larger one.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeTable {
    pub low_to_high: BTreeMap<(usize, usize, usize), bool>,
}

impl EdgeTable {
    pub fn orientation(&self, a: usize, b: usize, color: usize) -> Option<bool> {
        let key = if a < b { (a, b, color) } else { (b, a, color) };
        self.low_to_high.get(&key).map(|&lh| if a < b { lh } else { !lh })
    }

    /// Derives the edge table a valid 0-round map induces.
    pub fn from_zero_round(h: &IdGraph, out_color: &[usize]) -> EdgeTable {
        let mut low_to_high = BTreeMap::new();
        for c in 0..h.delta.min(ELIM_DELTA) {
            for (a, b) in h.layer_edges(c) {
                let lh = if out_color[a] == c {
                    true
                } else if out_color[b] == c {
                    false
                } else {
                    true // arbitrary, canonical low -> high
                };
                low_to_high.insert((a, b, c), lh);
            }
        }
        EdgeTable { low_to_high }
    }
}

/// The two gluable extensions proving the vertex algorithm inconsistent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BothOut {
    pub color: usize,
    pub u_view: VertexView1,
    pub v_view: VertexView1,
}

/// Vertex table -> edge table. For each layer-c edge {a, b}, side a fires
/// when some valid extension of B(a,1) orients the color-c half-edge out.
/// Both sides firing glues a counterexample. Neither side firing orients
/// low -> high.
pub fn eliminate_vertex_to_edge(
    h: &IdGraph,
    t1: &VertexTable1,
) -> Result<Result<EdgeTable, BothOut>, EliminationError> {
    if h.delta != ELIM_DELTA {
        return Err(EliminationError::UnsupportedDelta(h.delta));
    }
    if h.n_v > ELIM_MAX_NV {
        return Err(EliminationError::TableTooLarge(h.n_v));
    }
    let mut low_to_high = BTreeMap::new();
    for color in 0..ELIM_DELTA {
        for (a, b) in h.layer_edges(color) {
            let fire = |me: usize, other: usize| -> Result<Option<VertexView1>, EliminationError> {
                let others: Vec<usize> = (0..ELIM_DELTA).filter(|&c| c != color).collect();
                let exts: Vec<Vec<usize>> = others
                    .iter()
                    .map(|&c| h.layers[c][me].iter().copied().collect())
                    .collect();
                if exts.iter().any(|e| e.is_empty()) {
                    return Ok(None);
                }
                for &x in &exts[0] {
                    for &y in &exts[1] {
                        let mut nbr = [0usize; ELIM_DELTA];
                        nbr[color] = other;
                        nbr[others[0]] = x;
                        nbr[others[1]] = y;
                        let view = VertexView1 { label: me, nbr };
                        let bits = t1
                            .out
                            .get(&view)
                            .ok_or_else(|| EliminationError::MissingEntry(format!("{view:?}")))?;
                        if bits[color] {
                            return Ok(Some(view));
                        }
                    }
                }
                Ok(None)
            };
            let a_fires = fire(a, b)?;
            let b_fires = fire(b, a)?;
            match (a_fires, b_fires) {
                (Some(u_view), Some(v_view)) => {
                    return Ok(Err(BothOut { color, u_view, v_view }))
                }
                (Some(_), None) => {
                    low_to_high.insert((a, b, color), true);
                }
                (None, Some(_)) => {
                    low_to_high.insert((a, b, color), false);
                }
                (None, None) => {
                    low_to_high.insert((a, b, color), true);
                }
            }
        }
    }
    Ok(Ok(EdgeTable { low_to_high }))
}

/// A label no color can safely serve: for every color some layer neighbor
/// is oriented toward the label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinkLabel {
    pub label: usize,
    /// Per color, the neighbor whose shared edge points inward.
    pub inward_witness: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroRoundMap {
    pub out_color: Vec<usize>,
}

/// Edge table -> 0-round vertex map. A label takes the first color whose
/// every layer neighbor receives the edge from it; a label with no such
/// color witnesses that the edge algorithm was incorrect.
pub fn eliminate_edge_to_vertex(
    h: &IdGraph,
    te: &EdgeTable,
) -> Result<Result<ZeroRoundMap, SinkLabel>, EliminationError> {
    if h.delta != ELIM_DELTA {
        return Err(EliminationError::UnsupportedDelta(h.delta));
    }
    if h.n_v > ELIM_MAX_NV {
        return Err(EliminationError::TableTooLarge(h.n_v));
    }
    let mut out_color = vec![usize::MAX; h.n_v];
    'label: for label in 0..h.n_v {
        let mut witnesses = Vec::new();
        'color: for c in 0..ELIM_DELTA {
            if h.layers[c][label].is_empty() {
                // Unrealizable label side; cannot rely on this color.
                witnesses.push((c, usize::MAX));
                continue;
            }
            for &w in &h.layers[c][label] {
                match te.orientation(label, w, c) {
                    Some(true) => {}
                    Some(false) => {
                        witnesses.push((c, w));
                        continue 'color;
                    }
                    None => {
                        return Err(EliminationError::MissingEntry(format!(
                            "edge ({label},{w}) color {c}"
                        )))
                    }
                }
            }
            out_color[label] = c;
            continue 'label;
        }
        return Ok(Err(SinkLabel { label, inward_witness: witnesses }));
    }
    Ok(Ok(ZeroRoundMap { out_color }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idgraph::zeroround::{exhaustive_zero_round, valid_zero_round_map, ZeroRound};

    /// Two disjoint edges per layer: a valid zero-round map exists.
    fn solvable_h() -> IdGraph {
        let layer = vec![(0usize, 1usize), (2, 3)];
        IdGraph::from_edges(4, 3, 1, &[layer.clone(), layer.clone(), layer]).unwrap()
    }

    /// Complete layers on a Property-5 instance: impossible.
    fn impossible_h() -> IdGraph {
        let all: Vec<(usize, usize)> =
            (0..6).flat_map(|u| (u + 1..6).map(move |v| (u, v))).collect();
        IdGraph::from_edges(6, 3, 1, &[all.clone(), all.clone(), all]).unwrap()
    }

    #[test]
    fn correct_zero_round_survives_the_pipeline() {
        let h = solvable_h();
        let map = match exhaustive_zero_round(&h) {
            ZeroRound::Exists { out_color } => out_color,
            other => panic!("expected a map, got {other:?}"),
        };
        let te = EdgeTable::from_zero_round(&h, &map);
        match eliminate_edge_to_vertex(&h, &te).unwrap() {
            Ok(zr) => assert!(valid_zero_round_map(&h, &zr.out_color)),
            Err(w) => panic!("unexpected sink label {w:?}"),
        }
    }

    #[test]
    fn half_round_pipeline_reproduces_impossibility() {
        // On a Property-5 instance, no single-valued edge table can survive
        // the last elimination step: a sink label must appear.
        let h = impossible_h();
        // Any deterministic edge table, e.g. everything low -> high.
        let mut te = EdgeTable::default();
        for c in 0..3 {
            for (a, b) in h.layer_edges(c) {
                te.low_to_high.insert((a, b, c), true);
            }
        }
        match eliminate_edge_to_vertex(&h, &te).unwrap() {
            Err(SinkLabel { label, inward_witness }) => {
                // Every color of the sink label has an inward witness.
                assert_eq!(inward_witness.len(), 3);
                assert!(label < 6);
            }
            Ok(zr) => {
                assert!(
                    !valid_zero_round_map(&h, &zr.out_color),
                    "a valid map would contradict the pigeonhole certificate"
                );
                panic!("edge table unexpectedly survived");
            }
        }
    }

    #[test]
    fn incorrect_vertex_algorithm_yields_both_out_counterexample() {
        let h = solvable_h();
        // Deliberately incorrect: every half-edge points out.
        let t1 = VertexTable1::from_fn(&h, |_| [true; 3]);
        match eliminate_vertex_to_edge(&h, &t1).unwrap() {
            Err(BothOut { color, u_view, v_view }) => {
                // The two views share the connecting edge.
                assert_eq!(u_view.nbr[color], v_view.label);
                assert_eq!(v_view.nbr[color], u_view.label);
            }
            Ok(_) => panic!("expected a both-directions counterexample"),
        }
    }

    #[test]
    fn vertex_to_edge_to_zero_round_composition() {
        let h = solvable_h();
        // 1-round rule derived from a valid 0-round map: out iff my map
        // color matches the edge color.
        let map = match exhaustive_zero_round(&h) {
            ZeroRound::Exists { out_color } => out_color,
            _ => unreachable!(),
        };
        let map_for_table = map.clone();
        let t1 = VertexTable1::from_fn(&h, move |view| {
            let mut bits = [false; 3];
            bits[map_for_table[view.label]] = true;
            bits
        });
        let te = eliminate_vertex_to_edge(&h, &t1).unwrap().expect("consistent");
        match eliminate_edge_to_vertex(&h, &te).unwrap() {
            Ok(zr) => assert!(valid_zero_round_map(&h, &zr.out_color)),
            Err(w) => panic!("unexpected sink label {w:?}"),
        }
    }
}
