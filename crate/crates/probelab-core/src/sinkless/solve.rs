//! The full pipeline and its query mode.
//!
//! Global mode: decompose, orient cyclic clusters internally, solve the
//! contracted LLL so every all-min-degree tree cluster gets an outgoing
//! boundary edge, lift inter-cluster orientations, and orient tree clusters
//! toward a root owning an outgoing edge.
//!
//! Query mode answers one half-edge while metering graph probes: the
//! replayed information (colors, center statuses, cluster membership,
//! contracted LLL state) is charged through a per-query materialization
//! cache, so the probe count is what a from-scratch lazy evaluation of the
//! same functions would pay.

use super::cluster::{cluster_decompose, ClusterDecomposition, ClusterKind};
use crate::graph::{edge_key, HalfEdgeLabeling, NodeIdx, Port, PortedGraph, IN, OUT};
use crate::lll::{
    check_criterion, resolve_vars, CriterionKind, Event, LllInstance, ShatterConfig,
    ShatterEngine, Variable,
};
use crate::local::coloring::{ball_growth_bound, cascade_schedule, linial_step};
use crate::probe::QueryFailure;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SinklessError {
    #[error("decomposition failed: {0}")]
    Decompose(String),
    #[error("contracted LLL criterion failed for k in {0}..={1}")]
    CriterionUnsatisfied(usize, usize),
    #[error("shattering failed: {0}")]
    Shatter(String),
    #[error("query failed: {0}")]
    Query(QueryFailure),
    #[error("pipeline contract breached: {0}")]
    Contract(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinklessConfig {
    pub k: usize,
    pub min_deg: usize,
    pub shatter: ShatterConfig,
    /// How many times the pipeline may raise k when the contracted
    /// criterion fails.
    pub max_k_raise: usize,
}

impl Default for SinklessConfig {
    fn default() -> Self {
        SinklessConfig { k: 2, min_deg: 3, shatter: ShatterConfig::default(), max_k_raise: 3 }
    }
}

#[derive(Debug, Clone)]
pub struct SinklessQueryAnswer {
    pub label: String,
    pub probes: usize,
}

/// Contracted-instance bookkeeping: which LLL variable carries which
/// inter-cluster edge.
struct Contracted {
    inst: LllInstance,
    /// G-edge (u, v) with u < v -> variable id.
    var_of_edge: BTreeMap<(NodeIdx, NodeIdx), u64>,
    /// Center -> boundary variable ids in canonical order, with the member
    /// endpoint of each.
    boundary: BTreeMap<NodeIdx, Vec<(u64, NodeIdx, NodeIdx)>>,
    /// Cluster pair (a, b) per variable id.
    pair_of_var: BTreeMap<u64, (NodeIdx, NodeIdx)>,
    /// Centers that host an event.
    event_centers: BTreeSet<NodeIdx>,
}

fn contracted_instance(g: &PortedGraph, d: &ClusterDecomposition, min_deg: usize) -> Contracted {
    let n = g.node_count();
    let mut variables = Vec::new();
    let mut var_of_edge = BTreeMap::new();
    let mut pair_of_var = BTreeMap::new();
    let mut boundary: BTreeMap<NodeIdx, Vec<(u64, NodeIdx, NodeIdx)>> =
        d.centers.iter().map(|&c| (c, Vec::new())).collect();
    let mut copy_counter: BTreeMap<(NodeIdx, NodeIdx), u64> = BTreeMap::new();
    for &(a, b, u, v) in &d.contracted_edges {
        let copy = copy_counter.entry((a, b)).or_insert(0);
        // Parallel edges are separate variables (independent coins).
        let id = (((a * n + b) as u64) << 12) | *copy;
        *copy += 1;
        variables.push(Variable { id, domain: 2 });
        var_of_edge.insert(edge_key(u, v), id);
        pair_of_var.insert(id, (a, b));
        boundary.get_mut(&a).unwrap().push((id, u, v));
        boundary.get_mut(&b).unwrap().push((id, v, u));
    }
    for list in boundary.values_mut() {
        list.sort_unstable();
    }
    let mut events = Vec::new();
    for (&c, members) in &d.members {
        if d.kind[&c] != ClusterKind::TreeShaped {
            continue;
        }
        // A tree cluster with a sub-threshold node can root there and never
        // needs an outgoing boundary edge.
        if members.iter().any(|&v| g.degree(v) < min_deg) {
            continue;
        }
        let mut vbl: Vec<u64> = boundary[&c].iter().map(|&(id, _, _)| id).collect();
        // Scope cap: "all of the first 24 inward" is a superset of the true
        // bad event, so avoiding it still guarantees an outgoing edge.
        vbl.truncate(crate::lll::MAX_SCOPE);
        let bad: Vec<u32> = vbl
            .iter()
            .map(|id| {
                let (a, _b) = pair_of_var[id];
                // Value 0 orients cluster a -> cluster b; inward for c means
                // value 1 when c == a, value 0 otherwise.
                if a == c {
                    1
                } else {
                    0
                }
            })
            .collect();
        events.push(Event { id: c as u64, vbl, bad: vec![bad] });
    }
    let event_centers = events.iter().map(|e| e.id as NodeIdx).collect();
    let inst =
        LllInstance::new(variables, events).expect("contracted instance is well-formed");
    Contracted { inst, var_of_edge, boundary, pair_of_var, event_centers }
}

/// Reusable pipeline state for one (graph, config, seed). Global mode and
/// query mode share every deterministic sub-function, so their outputs
/// agree exactly.
pub struct SinklessSolver<'g> {
    pub g: &'g PortedGraph,
    pub cfg: SinklessConfig,
    pub seed: u64,
    pub k_used: usize,
    decomp: ClusterDecomposition,
    contracted: Contracted,
    schedule: Vec<(u64, u32)>,
}

impl<'g> SinklessSolver<'g> {
    pub fn new(g: &'g PortedGraph, cfg: SinklessConfig, seed: u64) -> Result<Self, SinklessError> {
        let mut k = cfg.k;
        loop {
            let decomp =
                cluster_decompose(g, k).map_err(|e| SinklessError::Decompose(e.to_string()))?;
            let contracted = contracted_instance(g, &decomp, cfg.min_deg);
            let ok = contracted.inst.events().is_empty()
                || check_criterion(
                    &contracted.inst,
                    CriterionKind::Polynomial(cfg.shatter.criterion_c),
                )
                .holds;
            if ok {
                let basis = ball_growth_bound(g.delta(), k);
                let schedule = cascade_schedule(g.node_count() as u128 + 1, basis);
                return Ok(SinklessSolver { g, cfg, seed, k_used: k, decomp, contracted, schedule });
            }
            if k >= cfg.k + cfg.max_k_raise {
                return Err(SinklessError::CriterionUnsatisfied(cfg.k, k));
            }
            k += 1;
        }
    }

    pub fn decomposition(&self) -> &ClusterDecomposition {
        &self.decomp
    }

    pub fn contracted_lll(&self) -> &LllInstance {
        &self.contracted.inst
    }

    /// Full labeling. Validity is the caller's check (verify_solution).
    pub fn global(&self) -> Result<HalfEdgeLabeling, SinklessError> {
        let engine = ShatterEngine::new(&self.contracted.inst, self.cfg.shatter, self.seed)
            .map_err(|e| SinklessError::Shatter(e.to_string()))?;
        let all_vars: Vec<usize> = (0..self.contracted.inst.variables().len()).collect();
        let values = resolve_vars(
            &self.contracted.inst,
            &engine,
            &self.cfg.shatter,
            &all_vars,
            self.seed,
        )
        .map_err(SinklessError::Query)?;
        let mut oriented_from: BTreeMap<(NodeIdx, NodeIdx), NodeIdx> = BTreeMap::new();
        // Inter-cluster edges straight from the LLL values.
        for (&(u, v), &var) in &self.contracted.var_of_edge {
            let (a, _) = self.contracted.pair_of_var[&var];
            let val = values[&var];
            let from_a = val == 0;
            let u_in_a = self.decomp.assignment[u] == a;
            oriented_from.insert((u, v), if from_a == u_in_a { u } else { v });
        }
        // Intra-cluster edges per cluster.
        for (&c, members) in &self.decomp.members {
            let orient = match self.decomp.kind[&c] {
                ClusterKind::Cyclic => orient_cyclic_cluster(self.g, members),
                ClusterKind::TreeShaped => {
                    let root = self.tree_root(c, &values)?;
                    orient_tree_cluster(self.g, members, root)
                }
            };
            oriented_from.extend(orient);
        }
        let mut lab = HalfEdgeLabeling::new(HalfEdgeLabeling::orientation_alphabet());
        for (u, v, pu, pv) in self.g.edges() {
            let from = oriented_from[&(u, v)];
            lab.set(u, pu, if from == u { OUT } else { IN });
            lab.set(v, pv, if from == u { IN } else { OUT });
        }
        Ok(lab)
    }

    /// The root of a tree cluster: the member endpoint of the smallest
    /// outgoing boundary variable, or the smallest-id sub-threshold member
    /// when the cluster hosts no event.
    fn tree_root(&self, c: NodeIdx, values: &BTreeMap<u64, u32>) -> Result<NodeIdx, SinklessError> {
        for &(var, mine, _theirs) in &self.contracted.boundary[&c] {
            let (a, _) = self.contracted.pair_of_var[&var];
            let val = *values.get(&var).ok_or_else(|| {
                SinklessError::Contract(format!("boundary variable {var} unresolved"))
            })?;
            let out_of_c = (val == 0) == (a == c);
            if out_of_c {
                return Ok(mine);
            }
        }
        if let Some(&r) = self
            .decomp
            .members
            .get(&c)
            .and_then(|m| m.iter().find(|&&v| self.g.degree(v) < self.cfg.min_deg))
        {
            return Ok(r);
        }
        Err(SinklessError::Contract(format!(
            "tree cluster {c} has no outgoing boundary edge and no sub-threshold root"
        )))
    }

    /// Answers one half-edge query with exact probe metering.
    pub fn query(&self, v: NodeIdx, port: Port) -> Result<SinklessQueryAnswer, SinklessError> {
        let mut ex = Explorer::new(self);
        let label = ex.orient_half_edge(v, port)?;
        Ok(SinklessQueryAnswer { label, probes: ex.probes })
    }
}

pub fn solve_sinkless(
    g: &PortedGraph,
    cfg: &SinklessConfig,
    seed: u64,
) -> Result<HalfEdgeLabeling, SinklessError> {
    SinklessSolver::new(g, *cfg, seed)?.global()
}

pub fn solve_sinkless_query(
    g: &PortedGraph,
    cfg: &SinklessConfig,
    seed: u64,
    v: NodeIdx,
    port: Port,
) -> Result<SinklessQueryAnswer, SinklessError> {
    SinklessSolver::new(g, *cfg, seed)?.query(v, port)
}

/// Deterministic orientation of a cluster containing a cycle: the first
/// cycle found from the lowest-id member is oriented starting at its
/// lowest-id node along that node's lowest-port cycle edge; every other
/// member orients toward the cycle along its BFS parent; leftover chords go
/// low -> high. No member is ever a sink, regardless of boundary edges.
pub(crate) fn orient_cyclic_cluster(
    g: &PortedGraph,
    members: &[NodeIdx],
) -> BTreeMap<(NodeIdx, NodeIdx), NodeIdx> {
    let set: BTreeSet<NodeIdx> = members.iter().copied().collect();
    let cycle = find_cycle_in(g, &set).expect("cyclic cluster contains a cycle");
    let mut oriented: BTreeMap<(NodeIdx, NodeIdx), NodeIdx> = BTreeMap::new();
    let l = cycle.len();
    for i in 0..l {
        let (x, y) = (cycle[i], cycle[(i + 1) % l]);
        oriented.insert(edge_key(x, y), x);
    }
    // Multi-source BFS from the cycle, orienting tree edges toward parents.
    let on_cycle: BTreeSet<NodeIdx> = cycle.iter().copied().collect();
    let mut dist: BTreeMap<NodeIdx, usize> = on_cycle.iter().map(|&c| (c, 0)).collect();
    let mut queue: VecDeque<NodeIdx> = cycle.iter().copied().collect();
    while let Some(u) = queue.pop_front() {
        for t in g.ports(u) {
            let w = t.neighbor;
            if set.contains(&w) && !dist.contains_key(&w) {
                dist.insert(w, dist[&u] + 1);
                oriented.insert(edge_key(w, u), w); // toward the cycle
                queue.push_back(w);
            }
        }
    }
    // Chords and remaining internal edges: low -> high. Every node already
    // has an out-edge.
    for &u in members {
        for t in g.ports(u) {
            let w = t.neighbor;
            if set.contains(&w) && u < w {
                oriented.entry((u, w)).or_insert(u);
            }
        }
    }
    oriented
}

/// BFS orientation of a tree-shaped cluster toward `root`: each non-root
/// member orients its parent edge outward, so only the root relies on its
/// outgoing boundary edge (or needs none when sub-threshold).
pub(crate) fn orient_tree_cluster(
    g: &PortedGraph,
    members: &[NodeIdx],
    root: NodeIdx,
) -> BTreeMap<(NodeIdx, NodeIdx), NodeIdx> {
    let set: BTreeSet<NodeIdx> = members.iter().copied().collect();
    let mut oriented = BTreeMap::new();
    let mut seen = BTreeSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for t in g.ports(u) {
            let w = t.neighbor;
            if set.contains(&w) && seen.insert(w) {
                oriented.insert(edge_key(w, u), w); // child -> parent
                queue.push_back(w);
            }
        }
    }
    oriented
}

/// First cycle within `set`, by BFS from the lowest-id member with ports
/// scanned in order; returned as a node sequence starting at its lowest-id
/// node, stepping first along that node's lowest-port cycle edge.
fn find_cycle_in(g: &PortedGraph, set: &BTreeSet<NodeIdx>) -> Option<Vec<NodeIdx>> {
    let mut parent: BTreeMap<NodeIdx, NodeIdx> = BTreeMap::new();
    let mut dist: BTreeMap<NodeIdx, usize> = BTreeMap::new();
    for &start in set {
        if dist.contains_key(&start) {
            continue;
        }
        dist.insert(start, 0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for t in g.ports(u) {
                let w = t.neighbor;
                if !set.contains(&w) {
                    continue;
                }
                if !dist.contains_key(&w) {
                    dist.insert(w, dist[&u] + 1);
                    parent.insert(w, u);
                    queue.push_back(w);
                } else if parent.get(&u) != Some(&w) && parent.get(&w) != Some(&u) {
                    // Close the cycle through the BFS tree.
                    let (mut pu, mut pw) = (u, w);
                    let mut path_u = vec![pu];
                    let mut path_w = vec![pw];
                    while dist[&pu] > dist[&pw] {
                        pu = parent[&pu];
                        path_u.push(pu);
                    }
                    while dist[&pw] > dist[&pu] {
                        pw = parent[&pw];
                        path_w.push(pw);
                    }
                    while pu != pw {
                        pu = parent[&pu];
                        pw = parent[&pw];
                        path_u.push(pu);
                        path_w.push(pw);
                    }
                    // path_u: u .. apex, path_w: w .. apex.
                    path_w.pop();
                    path_w.reverse();
                    let mut cycle = path_u;
                    cycle.extend(path_w);
                    return Some(canonical_cycle(g, cycle));
                }
            }
        }
    }
    None
}

/// Rotates/flips the cycle to start at its lowest-id node, stepping along
/// that node's lowest-port cycle edge.
fn canonical_cycle(g: &PortedGraph, cycle: Vec<NodeIdx>) -> Vec<NodeIdx> {
    let l = cycle.len();
    let (pos, _) = cycle.iter().enumerate().min_by_key(|&(_, &v)| v).unwrap();
    let low = cycle[pos];
    let succ = cycle[(pos + 1) % l];
    let pred = cycle[(pos + l - 1) % l];
    let port_of = |w: NodeIdx| g.ports(low).iter().find(|t| t.neighbor == w).unwrap().port;
    let forward = port_of(succ) <= port_of(pred);
    let mut out = Vec::with_capacity(l);
    for i in 0..l {
        let idx = if forward { (pos + i) % l } else { (pos + l - i) % l };
        out.push(cycle[idx]);
    }
    out
}

// ---------------------------------------------------------------------------
// Query-mode exploration with probe metering.
// ---------------------------------------------------------------------------

struct Explorer<'s, 'g> {
    s: &'s SinklessSolver<'g>,
    probes: usize,
    materialized: BTreeSet<NodeIdx>,
    color_memo: BTreeMap<NodeIdx, u64>,
    center_memo: BTreeMap<NodeIdx, bool>,
    cluster_memo: BTreeMap<NodeIdx, NodeIdx>,
    engine: Option<ShatterEngine<'s>>,
    charged_events: BTreeSet<usize>,
}

impl<'s, 'g> Explorer<'s, 'g> {
    fn new(s: &'s SinklessSolver<'g>) -> Self {
        Explorer {
            s,
            probes: 0,
            materialized: BTreeSet::new(),
            color_memo: BTreeMap::new(),
            center_memo: BTreeMap::new(),
            cluster_memo: BTreeMap::new(),
            engine: None,
            charged_events: BTreeSet::new(),
        }
    }

    /// Fetching a node's ports costs its degree in probes, once per query.
    fn materialize(&mut self, v: NodeIdx) {
        if self.materialized.insert(v) {
            self.probes += self.s.g.degree(v);
        }
    }

    /// Materializes everything strictly inside radius r (which reveals all
    /// ball edges and the ids on the horizon).
    fn ball(&mut self, center: NodeIdx, r: usize) -> Vec<(NodeIdx, usize)> {
        let mut dist = BTreeMap::from([(center, 0usize)]);
        let mut queue = VecDeque::from([center]);
        while let Some(u) = queue.pop_front() {
            let du = dist[&u];
            if du >= r {
                continue;
            }
            self.materialize(u);
            for w in self.s.g.neighbors(u) {
                if !dist.contains_key(&w) {
                    dist.insert(w, du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist.into_iter().collect()
    }

    /// Replays the Linial cascade color of one node inside its radius
    /// k * rounds ball; must agree with the global decomposition.
    fn color(&mut self, v: NodeIdx) -> u64 {
        if let Some(&c) = self.color_memo.get(&v) {
            return c;
        }
        let k = self.s.k_used;
        let rounds = self.s.schedule.len().max(1);
        let ball = self.ball(v, k * rounds);
        let index: BTreeMap<NodeIdx, usize> =
            ball.iter().enumerate().map(|(i, &(n, _))| (n, i)).collect();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); ball.len()];
        for (&nid, &i) in &index {
            if self.materialized.contains(&nid) {
                for w in self.s.g.neighbors(nid) {
                    if let Some(&j) = index.get(&w) {
                        adj[i].push(j);
                    }
                }
            }
        }
        let kn = |start: usize| -> Vec<usize> {
            let mut d = BTreeMap::from([(start, 0usize)]);
            let mut q = VecDeque::from([start]);
            let mut out = Vec::new();
            while let Some(x) = q.pop_front() {
                let dx = d[&x];
                if dx >= k {
                    continue;
                }
                for &y in &adj[x] {
                    if !d.contains_key(&y) {
                        d.insert(y, dx + 1);
                        q.push_back(y);
                        out.push(y);
                    }
                }
            }
            out
        };
        let mut colors: Vec<u128> = ball.iter().map(|&(n, _)| self.s.g.id_of(n) as u128).collect();
        for &(q, dd) in &self.s.schedule {
            let next: Vec<u128> = (0..ball.len())
                .map(|i| {
                    let nbr: Vec<u128> = kn(i).into_iter().map(|j| colors[j]).collect();
                    linial_step(colors[i], &nbr, q, dd) as u128
                })
                .collect();
            colors = next;
        }
        let c = colors[index[&v]] as u64;
        debug_assert_eq!(c, self.s.decomp.colors[v], "color replay diverged at node {v}");
        self.color_memo.insert(v, c);
        c
    }

    /// Greedy-by-(color, id) MIS status on G^k, with short-circuit
    /// evaluation in increasing key order.
    fn is_center(&mut self, v: NodeIdx) -> bool {
        if let Some(&b) = self.center_memo.get(&v) {
            return b;
        }
        let key = (self.color(v), self.s.g.id_of(v));
        let ball = self.ball(v, self.s.k_used);
        let mut earlier: Vec<(u64, u64, NodeIdx)> = ball
            .iter()
            .filter(|&&(w, dw)| w != v && dw >= 1)
            .map(|&(w, _)| (self.color(w), self.s.g.id_of(w), w))
            .filter(|&(c, id, _)| (c, id) < key)
            .collect();
        earlier.sort_unstable();
        let mut status = true;
        for (_, _, w) in earlier {
            if self.is_center(w) {
                status = false;
                break;
            }
        }
        debug_assert_eq!(
            status,
            self.s.decomp.centers.contains(&v),
            "center replay diverged at node {v}"
        );
        self.center_memo.insert(v, status);
        status
    }

    /// Distance from v to the nearest center.
    fn center_distance(&mut self, v: NodeIdx) -> usize {
        let ball = self.ball(v, self.s.k_used);
        let mut best = None;
        for (w, dw) in ball {
            if best.map_or(true, |b| dw < b) && self.is_center(w) {
                best = Some(dw);
            }
        }
        best.expect("a center exists within distance k")
    }

    /// Cluster assignment by the parent chain.
    fn cluster(&mut self, v: NodeIdx) -> NodeIdx {
        if let Some(&c) = self.cluster_memo.get(&v) {
            return c;
        }
        let c = if self.is_center(v) {
            v
        } else {
            let dv = self.center_distance(v);
            self.materialize(v);
            let nbrs: Vec<NodeIdx> = self.s.g.neighbors(v).collect();
            let mut parent = None;
            for u in nbrs {
                if self.center_distance(u) == dv - 1 {
                    let key = self.s.g.id_of(u);
                    if parent.map_or(true, |(best, _)| key < best) {
                        parent = Some((key, u));
                    }
                }
            }
            let (_, parent) = parent.expect("closer neighbor exists");
            self.cluster(parent)
        };
        debug_assert_eq!(c, self.s.decomp.assignment[v], "cluster replay diverged at node {v}");
        self.cluster_memo.insert(v, c);
        c
    }

    /// Members of a cluster, found inside B(center, k).
    fn cluster_members(&mut self, center: NodeIdx) -> Vec<NodeIdx> {
        let ball = self.ball(center, self.s.k_used);
        let mut members = Vec::new();
        for (w, _) in ball {
            if self.cluster(w) == center {
                self.materialize(w);
                members.push(w);
            }
        }
        members.sort_unstable();
        debug_assert_eq!(&members, &self.s.decomp.members[&center]);
        members
    }

    /// Charges the materialization a contracted-LLL touch implies: the
    /// cluster's members plus the cluster assignment of every boundary
    /// endpoint.
    fn charge_cluster_touch(&mut self, center: NodeIdx) {
        let members = self.cluster_members(center);
        let member_set: BTreeSet<NodeIdx> = members.iter().copied().collect();
        for &m in &members {
            let nbrs: Vec<NodeIdx> = self.s.g.neighbors(m).collect();
            for w in nbrs {
                if !member_set.contains(&w) {
                    self.cluster(w);
                }
            }
        }
    }

    /// Resolves contracted variables through the lazy shattering engine and
    /// charges every touched contracted event as a cluster materialization.
    fn contracted_values(&mut self, vars: &[u64]) -> Result<BTreeMap<u64, u32>, SinklessError> {
        let inst = &self.s.contracted.inst;
        if self.engine.is_none() {
            let engine = ShatterEngine::new(inst, self.s.cfg.shatter, self.s.seed)
                .map_err(|e| SinklessError::Shatter(e.to_string()))?;
            engine.reset_meter();
            self.engine = Some(engine);
        }
        let engine = self.engine.take().expect("engine cached");
        let scope: Vec<usize> = vars
            .iter()
            .map(|&id| inst.var_idx(id).expect("contracted variable exists"))
            .collect();
        let values = resolve_vars(inst, &engine, &self.s.cfg.shatter, &scope, self.s.seed)
            .map_err(SinklessError::Query);
        let touched = engine.touched_events();
        self.engine = Some(engine);
        for e in touched {
            if self.charged_events.insert(e) {
                let center = inst.events()[e].id as NodeIdx;
                self.charge_cluster_touch(center);
            }
        }
        values
    }

    fn orient_half_edge(&mut self, v: NodeIdx, port: Port) -> Result<String, SinklessError> {
        self.materialize(v);
        let t = *self
            .s
            .g
            .port_target(v, port)
            .ok_or_else(|| SinklessError::Query(QueryFailure::PortOutOfRange { id: 0, port }))?;
        let u = t.neighbor;
        let cv = self.cluster(v);
        let cu = self.cluster(u);
        let oriented_from: NodeIdx = if cv != cu {
            let var = self.s.contracted.var_of_edge[&edge_key(v, u)];
            let values = self.contracted_values(&[var])?;
            let (a, _) = self.s.contracted.pair_of_var[&var];
            let from_a = values[&var] == 0;
            let v_in_a = cv == a;
            if from_a == v_in_a {
                v
            } else {
                u
            }
        } else {
            let members = self.cluster_members(cv);
            match self.s.decomp.kind[&cv] {
                ClusterKind::Cyclic => orient_cyclic_cluster(self.s.g, &members)[&edge_key(v, u)],
                ClusterKind::TreeShaped => {
                    let root = if self.s.contracted.event_centers.contains(&cv) {
                        let vars: Vec<u64> = self.s.contracted.inst.events()
                            [self.s.contracted.inst.event_idx(cv as u64).unwrap()]
                        .vbl
                        .clone();
                        let values = self.contracted_values(&vars)?;
                        self.s.tree_root(cv, &values)?
                    } else {
                        // Boundary values irrelevant for the root here.
                        self.s.tree_root(cv, &self.no_boundary_out(cv))?
                    };
                    orient_tree_cluster(self.s.g, &members, root)[&edge_key(v, u)]
                }
            }
        };
        Ok(if oriented_from == v { OUT.to_string() } else { IN.to_string() })
    }

    /// For event-free tree clusters the root rule never reads boundary
    /// values; feed orientations that are all inward so the search falls
    /// through to the sub-threshold member.
    fn no_boundary_out(&self, c: NodeIdx) -> BTreeMap<u64, u32> {
        self.s
            .contracted
            .boundary
            .get(&c)
            .map(|list| {
                list.iter()
                    .map(|&(var, _, _)| {
                        let (a, _) = self.s.contracted.pair_of_var[&var];
                        (var, if a == c { 1 } else { 0 })
                    })
                    .collect()
            })
            .unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen::build_from_edges;
    use crate::graph::{gen_random_regular, verify_solution, Problem};
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
    fn c5_is_vacuously_valid() {
        let g = cycle(5);
        let lab = solve_sinkless(&g, &SinklessConfig::default(), 3).unwrap();
        assert!(verify_solution(&g, &lab, Problem::Sinkless { min_deg: 3 }).is_valid());
    }

    #[test]
    fn k4_solves_via_the_cyclic_path() {
        let g = k4();
        let lab = solve_sinkless(&g, &SinklessConfig::default(), 5).unwrap();
        assert!(verify_solution(&g, &lab, Problem::Sinkless { min_deg: 3 }).is_valid());
    }

    #[test]
    fn random_3_regular_instances_solve() {
        for seed in 0..15u64 {
            let g = gen_random_regular(128, 3, 3, seed).unwrap();
            let lab = solve_sinkless(&g, &SinklessConfig::default(), seed ^ 0x5eed).unwrap();
            assert!(
                verify_solution(&g, &lab, Problem::Sinkless { min_deg: 3 }).is_valid(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn random_4_regular_instances_solve() {
        for seed in 0..10u64 {
            let g = gen_random_regular(96, 4, 3, seed).unwrap();
            let lab = solve_sinkless(&g, &SinklessConfig::default(), seed).unwrap();
            assert!(
                verify_solution(&g, &lab, Problem::Sinkless { min_deg: 3 }).is_valid(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn query_mode_matches_global_mode() {
        for seed in 0..5u64 {
            let g = gen_random_regular(64, 3, 3, seed).unwrap();
            let solver = SinklessSolver::new(&g, SinklessConfig::default(), seed).unwrap();
            let global = solver.global().unwrap();
            for (v, p) in g.half_edges() {
                let ans = solver.query(v, p).unwrap();
                assert_eq!(
                    Some(ans.label.as_str()),
                    global.get(v, p),
                    "seed {seed} node {v} port {p}"
                );
                assert!(ans.probes > 0);
            }
        }
    }

    #[test]
    fn cyclic_cluster_has_no_sink_under_adversarial_boundary() {
        // Orient all boundary edges inward: cyclic clusters must still have
        // an out-edge at every member.
        let g = gen_random_regular(64, 3, 3, 11).unwrap();
        let d = cluster_decompose(&g, 2).unwrap();
        for (&c, members) in &d.members {
            if d.kind[&c] != ClusterKind::Cyclic {
                continue;
            }
            let orient = orient_cyclic_cluster(&g, members);
            let set: BTreeSet<_> = members.iter().copied().collect();
            for &m in members {
                let has_out = g.neighbors(m).any(|w| {
                    set.contains(&w) && orient.get(&edge_key(m, w)) == Some(&m)
                });
                assert!(has_out, "member {m} of cyclic cluster {c} is a sink");
            }
        }
    }

    #[test]
    fn tree_cluster_lift_gives_everyone_an_out_edge() {
        let g = gen_random_regular(64, 3, 3, 13).unwrap();
        let d = cluster_decompose(&g, 2).unwrap();
        for (&c, members) in &d.members {
            if d.kind[&c] != ClusterKind::TreeShaped || members.len() > 12 {
                continue;
            }
            // Any member with a boundary edge may serve as root.
            for &root in members.iter() {
                let orient = orient_tree_cluster(&g, members, root);
                let set: BTreeSet<_> = members.iter().copied().collect();
                for &m in members {
                    if m == root {
                        continue;
                    }
                    let has_out = g.neighbors(m).any(|w| {
                        set.contains(&w) && orient.get(&edge_key(m, w)) == Some(&m)
                    });
                    assert!(has_out, "member {m} lacks an out-edge toward root {root}");
                }
            }
        }
    }
}
