//! The fooling harness: runs a deterministic coloring algorithm on the lazy
//! host, finds a monochromatic core edge, and extracts a replay-verified
//! certificate tree.

use super::chromatic::gen_high_girth_chromatic;
use super::host::{EscapeEvent, HostQuerySource, LazyHost};
use crate::graph::{GraphError, HalfEdgeTarget, NodeId, Port, PortedGraph};
use crate::probe::{
    run_query, run_query_on_source, FarProbes, ModelConfig, ModelKind, IdSpace, Outcome,
    ProbeAlgorithm, ProbeTranscript, QueryCtx, QueryFailure, QueryTarget, Randomness,
};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FoolError {
    #[error("core generation failed: {0}")]
    Core(#[from] GraphError),
    #[error("harness inconsistency: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy)]
pub struct FoolConfig {
    /// The algorithm claims to c-color n-node trees.
    pub c: usize,
    pub n: usize,
    /// Ids are uniform in [n^id_exponent]; the paper fixes 10, desk scale
    /// uses smaller values to keep collisions observable.
    pub id_exponent: u32,
    pub probe_budget: Option<usize>,
}

impl FoolConfig {
    pub fn id_space(&self) -> u64 {
        (self.n as u64).saturating_pow(self.id_exponent)
    }
}

#[derive(Debug, Clone)]
pub struct FoolingCertificate {
    pub v_core: usize,
    pub w_core: usize,
    pub v_id: NodeId,
    pub w_id: NodeId,
    pub color: String,
    pub tree: PortedGraph,
    pub v_transcript: ProbeTranscript,
    pub w_transcript: ProbeTranscript,
}

#[derive(Debug)]
pub enum FoolOutcome {
    Certificate(Box<FoolingCertificate>),
    Escape { events: Vec<EscapeEvent>, failed_queries: usize },
}

#[derive(Debug)]
pub struct FoolReport {
    pub outcome: FoolOutcome,
    pub delta_h: usize,
    pub girth: usize,
    pub probe_budget: Option<usize>,
    pub max_probes: usize,
}

/// Minimal host degree with (delta_h - 1)^(g/4) >= id_space, at least the
/// core degree plus one so every core node gets a padding subtree.
fn minimal_host_degree(core_max_degree: usize, girth: usize, id_space: u64) -> usize {
    let g4 = girth.div_ceil(4).max(1);
    let mut d = core_max_degree + 1;
    loop {
        let base = (d - 1) as f64;
        if g4 as f64 * base.ln() >= (id_space as f64).ln() {
            return d;
        }
        d += 1;
    }
}

pub fn fool_coloring_algorithm(
    alg: &dyn ProbeAlgorithm,
    cfg: &FoolConfig,
    seed: u64,
) -> Result<FoolReport, FoolError> {
    let core_report = gen_high_girth_chromatic(cfg.c, cfg.n, seed)?;
    let core = core_report.graph;
    let girth = core_report.girth;
    let id_space = cfg.id_space();
    let delta_h = minimal_host_degree(core.max_degree(), girth, id_space);
    let mut host = LazyHost::new(core.clone(), delta_h, id_space, seed);
    let model = ModelConfig {
        model: ModelKind::Volume,
        id_space: IdSpace::Polynomial(cfg.id_exponent),
        far_probes: FarProbes::Forbidden,
        randomness: Randomness::None,
        advertised_n: cfg.n,
        probe_budget: cfg.probe_budget,
    };

    let mut colors: Vec<Option<String>> = vec![None; core.node_count()];
    let mut transcripts: Vec<Option<ProbeTranscript>> = vec![None; core.node_count()];
    let mut handle_steps: Vec<Vec<(usize, Port, usize, Port)>> = vec![Vec::new(); core.node_count()];
    let mut anchor_handles = vec![0usize; core.node_count()];
    let mut escapes = Vec::new();
    let mut failed_queries = 0usize;
    let mut max_probes = 0usize;
    for v in 0..core.node_count() {
        let mut src = HostQuerySource::new(&mut host, v, girth);
        let anchor_handle = src.host.core_anchor(v);
        let anchor_id = src.host.node_id(anchor_handle);
        anchor_handles[v] = anchor_handle;
        let (outcome, transcript) =
            run_query_on_source(alg, &mut src, QueryTarget::Node(anchor_id), &model);
        max_probes = max_probes.max(transcript.probe_count());
        escapes.extend(src.escapes.clone());
        handle_steps[v] = src.handle_steps.clone();
        match outcome {
            Outcome::Output(c) => colors[v] = Some(c),
            Outcome::Failed(_) => failed_queries += 1,
        }
        transcripts[v] = Some(transcript);
    }
    if !escapes.is_empty() || failed_queries > 0 {
        return Ok(FoolReport {
            outcome: FoolOutcome::Escape { events: escapes, failed_queries },
            delta_h,
            girth,
            probe_budget: cfg.probe_budget,
            max_probes,
        });
    }

    // The core's chromatic number exceeds c, so some edge is monochromatic.
    let (u, v) = core
        .edges()
        .iter()
        .map(|&(u, v, _, _)| (u, v))
        .find(|&(u, v)| colors[u].is_some() && colors[u] == colors[v])
        .ok_or_else(|| {
            FoolError::Inconsistent(
                "no monochromatic core edge despite chromatic number > c".into(),
            )
        })?;

    match build_certificate(
        &host, cfg, delta_h, u, v, &anchor_handles, &handle_steps, &transcripts, &colors, alg,
        &model,
    )? {
        Ok(cert) => Ok(FoolReport {
            outcome: FoolOutcome::Certificate(Box::new(cert)),
            delta_h,
            girth,
            probe_budget: cfg.probe_budget,
            max_probes,
        }),
        Err(events) => Ok(FoolReport {
            outcome: FoolOutcome::Escape { events, failed_queries },
            delta_h,
            girth,
            probe_budget: cfg.probe_budget,
            max_probes,
        }),
    }
}

/// Assembles the n-node tree the two transcripts embed into, replays both
/// queries on it, and checks the replay reproduces the recorded colors.
#[allow(clippy::too_many_arguments)]
fn build_certificate(
    host: &LazyHost,
    cfg: &FoolConfig,
    delta_h: usize,
    u: usize,
    v: usize,
    anchor_handles: &[usize],
    handle_steps: &[Vec<(usize, Port, usize, Port)>],
    _transcripts: &[Option<ProbeTranscript>],
    colors: &[Option<String>],
    alg: &dyn ProbeAlgorithm,
    model: &ModelConfig,
) -> Result<Result<FoolingCertificate, Vec<EscapeEvent>>, FoolError> {
    // Handles the two queries touched, and the edges they traversed.
    let mut probed: BTreeSet<usize> = BTreeSet::from([anchor_handles[u], anchor_handles[v]]);
    let mut touched: BTreeSet<usize> = probed.clone();
    let mut edges: BTreeMap<(usize, Port), (usize, Port)> = BTreeMap::new();
    for &q in &[u, v] {
        for &(h, p, nb, rp) in &handle_steps[q] {
            probed.insert(h);
            touched.insert(nb);
            touched.insert(h);
            edges.insert((h, p), (nb, rp));
            edges.insert((nb, rp), (h, p));
        }
    }
    // Unique ids across the pair.
    let mut id_of: BTreeMap<usize, NodeId> = BTreeMap::new();
    let mut seen_ids: BTreeMap<NodeId, usize> = BTreeMap::new();
    for &h in &touched {
        let id = host.node_id(h);
        if let Some(&other) = seen_ids.get(&id) {
            if other != h {
                return Ok(Err(vec![EscapeEvent::CrossPairDuplicate { id }]));
            }
        }
        seen_ids.insert(id, h);
        id_of.insert(h, id);
    }
    // Acyclicity of the touched subgraph.
    let mut edge_set: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (&(h, _), &(nb, _)) in &edges {
        edge_set.insert(if h < nb { (h, nb) } else { (nb, h) });
    }
    if !forest(&touched, &edge_set) {
        return Ok(Err(vec![EscapeEvent::CycleSeen]));
    }

    // Build the tree: touched nodes keep ids and original ports; probed
    // nodes are padded to full host degree with fresh leaves; then a path
    // pads the total to exactly n.
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut ids: Vec<NodeId> = Vec::new();
    let mut adjacency: Vec<Vec<HalfEdgeTarget>> = Vec::new();
    for &h in &touched {
        index.insert(h, ids.len());
        ids.push(id_of[&h]);
        adjacency.push(Vec::new());
    }
    for (&(h, p), &(nb, rp)) in &edges {
        let a = index[&h];
        let b = index[&nb];
        adjacency[a].push(HalfEdgeTarget { port: p, neighbor: b, reciprocal_port: rp });
    }
    let mut used_ids: BTreeSet<NodeId> = ids.iter().copied().collect();
    let mut next_fresh: NodeId = 1;
    let fresh_id = |used: &mut BTreeSet<NodeId>, next: &mut NodeId| -> NodeId {
        while used.contains(next) {
            *next += 1;
        }
        let id = *next;
        used.insert(id);
        id
    };
    // The replay relies on probed nodes keeping their revealed degree
    // (delta_h) and unprobed nodes never having revealed theirs, so fresh
    // edges may only touch unprobed tree nodes.
    let probed_tree: BTreeSet<usize> = probed.iter().map(|h| index[&h]).collect();
    let mut safe_attach: Vec<usize> = Vec::new();
    for &h in &probed {
        let a = index[&h];
        let covered: BTreeSet<Port> = adjacency[a].iter().map(|t| t.port).collect();
        for p in 1..=delta_h {
            if covered.contains(&p) {
                continue;
            }
            let id = fresh_id(&mut used_ids, &mut next_fresh);
            let b = ids.len();
            ids.push(id);
            adjacency.push(vec![HalfEdgeTarget { port: 1, neighbor: a, reciprocal_port: p }]);
            adjacency[a].push(HalfEdgeTarget { port: p, neighbor: b, reciprocal_port: 1 });
            safe_attach.push(b);
        }
    }
    for i in 0..ids.len() {
        if !probed_tree.contains(&i) && !safe_attach.contains(&i) {
            safe_attach.push(i);
        }
    }
    if safe_attach.is_empty() {
        return Err(FoolError::Inconsistent("no unprobed node to extend the tree from".into()));
    }
    // Join the components: every component contains an unprobed node (an
    // anchor keeps at least one padded leaf), and unprobed nodes tolerate
    // fresh edges.
    let next_port = |adj: &Vec<HalfEdgeTarget>| adj.iter().map(|t| t.port).max().unwrap_or(0) + 1;
    loop {
        let comp = components(ids.len(), &adjacency);
        if comp.iter().all(|&c| c == comp[0]) {
            break;
        }
        // Pick one safe node in the first two distinct components.
        let c0 = comp[safe_attach[0]];
        let a = safe_attach[0];
        let b = *safe_attach
            .iter()
            .find(|&&x| comp[x] != c0)
            .ok_or_else(|| FoolError::Inconsistent("component without safe node".into()))?;
        let (pa, pb) = (next_port(&adjacency[a]), next_port(&adjacency[b]));
        adjacency[a].push(HalfEdgeTarget { port: pa, neighbor: b, reciprocal_port: pb });
        adjacency[b].push(HalfEdgeTarget { port: pb, neighbor: a, reciprocal_port: pa });
    }
    if ids.len() > cfg.n {
        return Err(FoolError::Inconsistent(format!(
            "certificate needs {} nodes but the advertised n is {}",
            ids.len(),
            cfg.n
        )));
    }
    // Pad with a path to exactly n nodes, hanging off a safe node.
    let mut tail = safe_attach[0];
    while ids.len() < cfg.n {
        let id = fresh_id(&mut used_ids, &mut next_fresh);
        let b = ids.len();
        let tail_port = next_port(&adjacency[tail]);
        ids.push(id);
        adjacency.push(vec![HalfEdgeTarget { port: 1, neighbor: tail, reciprocal_port: tail_port }]);
        adjacency[tail].push(HalfEdgeTarget { port: tail_port, neighbor: b, reciprocal_port: 1 });
        tail = b;
    }
    let max_deg = adjacency.iter().map(|l| l.len()).max().unwrap_or(1);
    let tree = PortedGraph::new(delta_h.max(max_deg), ids, adjacency, None, None)
        .map_err(|e| FoolError::Inconsistent(format!("certificate tree invalid: {e}")))?;
    if !tree.is_acyclic() || !tree.is_connected() {
        return Ok(Err(vec![EscapeEvent::CycleSeen]));
    }

    // Replay both queries on the finished tree.
    let v_id = host.node_id(anchor_handles[u]);
    let w_id = host.node_id(anchor_handles[v]);
    let mut replayed = Vec::new();
    for (&core_node, &qid) in [(&u, &v_id), (&v, &w_id)] {
        let (outcome, transcript) = run_query(alg, &tree, QueryTarget::Node(qid), model);
        match outcome {
            Outcome::Output(c) if Some(&c) == colors[core_node].as_ref() => replayed.push(transcript),
            other => {
                return Err(FoolError::Inconsistent(format!(
                    "replay diverged at core node {core_node}: {other:?} vs {:?}",
                    colors[core_node]
                )))
            }
        }
    }
    let w_transcript = replayed.pop().expect("two replays");
    let v_transcript = replayed.pop().expect("two replays");
    Ok(Ok(FoolingCertificate {
        v_core: u,
        w_core: v,
        v_id,
        w_id,
        color: colors[u].clone().expect("colored"),
        tree,
        v_transcript,
        w_transcript,
    }))
}

fn components(n: usize, adjacency: &[Vec<HalfEdgeTarget>]) -> Vec<usize> {
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for t in &adjacency[x] {
                if comp[t.neighbor] == usize::MAX {
                    comp[t.neighbor] = next;
                    stack.push(t.neighbor);
                }
            }
        }
        next += 1;
    }
    comp
}

fn forest(nodes: &BTreeSet<usize>, edges: &BTreeSet<(usize, usize)>) -> bool {
    // Union-find cycle check.
    let idx: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(i, &h)| (h, i)).collect();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, idx[&a]), find(&mut parent, idx[&b]));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

// ---------------------------------------------------------------------------
// Built-in deterministic baselines the harness defeats.
// ---------------------------------------------------------------------------

/// Always answers color 1, probing nothing.
pub struct ConstantColorer;

impl ProbeAlgorithm for ConstantColorer {
    fn name(&self) -> &str {
        "constant"
    }
    fn output_alphabet(&self) -> Vec<String> {
        vec!["1".into(), "2".into()]
    }
    fn run(&self, _ctx: &mut QueryCtx<'_>) -> Result<String, QueryFailure> {
        Ok("1".into())
    }
}

/// Guesses from the node's own id parity, probing nothing.
pub struct ParityGuess;

impl ProbeAlgorithm for ParityGuess {
    fn name(&self) -> &str {
        "parity-guess"
    }
    fn output_alphabet(&self) -> Vec<String> {
        vec!["1".into(), "2".into()]
    }
    fn run(&self, ctx: &mut QueryCtx<'_>) -> Result<String, QueryFailure> {
        Ok(((ctx.query().owner() % 2) + 1).to_string())
    }
}

/// BFS to a probe budget, then 2-colors by parity of distance to the
/// smallest id seen. Deterministic, and locally consistent on trees it can
/// fully explore.
pub struct GreedyBfsColorer {
    pub budget: usize,
}

impl ProbeAlgorithm for GreedyBfsColorer {
    fn name(&self) -> &str {
        "greedy-bfs"
    }
    fn output_alphabet(&self) -> Vec<String> {
        vec!["1".into(), "2".into()]
    }
    fn run(&self, ctx: &mut QueryCtx<'_>) -> Result<String, QueryFailure> {
        let me = ctx.query().owner();
        let my_deg = ctx.query_view().degree;
        let mut dist: BTreeMap<NodeId, usize> = BTreeMap::from([(me, 0)]);
        let mut deg: BTreeMap<NodeId, usize> = BTreeMap::from([(me, my_deg)]);
        let mut queue: std::collections::VecDeque<NodeId> = [me].into();
        let mut spent = 0usize;
        'bfs: while let Some(x) = queue.pop_front() {
            let dx = dist[&x];
            for p in 1..=deg[&x] {
                if spent >= self.budget {
                    break 'bfs;
                }
                let a = ctx.probe(x, p)?;
                spent += 1;
                if !dist.contains_key(&a.neighbor_id) {
                    dist.insert(a.neighbor_id, dx + 1);
                    queue.push_back(a.neighbor_id);
                }
                deg.entry(x).or_insert(a.probed_degree);
                // The neighbor's degree is unknown until probed; default to
                // the probed node's (hosts are regular).
                deg.entry(a.neighbor_id).or_insert(a.probed_degree);
            }
        }
        let anchor = *dist.keys().min().expect("at least the query node");
        Ok((1 + (dist[&anchor] + dist[&me]) % 2).to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> FoolConfig {
        FoolConfig { c: 2, n: 101, id_exponent: 3, probe_budget: None }
    }

    #[test]
    fn constant_colorer_is_fooled() {
        let mut budgeted = small_cfg();
        budgeted.probe_budget = Some(12);
        let report = fool_coloring_algorithm(&ConstantColorer, &budgeted, 3).unwrap();
        match report.outcome {
            FoolOutcome::Certificate(cert) => {
                assert!(cert.tree.is_acyclic());
                assert_eq!(cert.tree.node_count(), 101);
                assert_eq!(cert.color, "1");
            }
            FoolOutcome::Escape { events, .. } => panic!("unexpected escape {events:?}"),
        }
    }

    #[test]
    fn parity_guess_is_fooled_or_escapes_rarely() {
        let mut certs = 0;
        for seed in 0..10 {
            let report = fool_coloring_algorithm(&ParityGuess, &small_cfg(), seed).unwrap();
            if matches!(report.outcome, FoolOutcome::Certificate(_)) {
                certs += 1;
            }
        }
        assert!(certs >= 9, "only {certs}/10 certificates");
    }

    #[test]
    fn greedy_bfs_is_fooled_on_odd_cycles() {
        let cfg = FoolConfig {
            c: 2,
            n: 101,
            id_exponent: 3,
            probe_budget: Some(101 / 8),
        };
        let alg = GreedyBfsColorer { budget: 101 / 8 };
        let mut certs = 0;
        for seed in 0..10 {
            let report = fool_coloring_algorithm(&alg, &cfg, seed).unwrap();
            if let FoolOutcome::Certificate(cert) = report.outcome {
                certs += 1;
                // The certificate exhibits the monochromatic edge on a valid
                // input tree.
                assert!(cert.tree.is_connected());
                assert!(cert.tree.max_degree() <= report.delta_h);
            }
        }
        assert!(certs >= 8, "only {certs}/10 certificates");
    }
}
