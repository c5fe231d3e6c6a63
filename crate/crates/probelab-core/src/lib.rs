//! probelab-core: an executable laboratory for local computation algorithms.
//!
//! The crate models the LCA / VOLUME / LOCAL probe hierarchy with exact
//! probe accounting, and implements on top of it a randomized O(log n)-probe
//! Lovász Local Lemma solver, the sinkless-orientation pipeline, ID-graph
//! construction and round-elimination checks, and a fooling adversary for
//! deterministic coloring algorithms.

pub mod adversary;
pub mod bench;
pub mod graph;
pub mod idgraph;
pub mod lll;
pub mod local;
pub mod probe;
pub mod sinkless;
pub mod rng;

pub use graph::{HalfEdgeLabeling, PortedGraph};
pub use probe::{ModelConfig, ProbeTranscript};
