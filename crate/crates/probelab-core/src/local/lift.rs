//! Speedup combinator: runs a probe algorithm that expects unique ids from a
//! huge range (and a constant advertised node count) by feeding it
//! distance-(n0+r) colors as identifiers.

use super::coloring::{ball_growth_bound, cascade_schedule, linial_step};
use crate::graph::{NodeId, Port};
use crate::probe::{ProbeAlgorithm, QueryCtx, QueryFailure, QueryTarget};
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigIdAnswer {
    pub neighbor_id: NodeId,
    pub probed_degree: usize,
    pub reciprocal_port: Port,
}

/// The restricted oracle surface a lifted algorithm sees: synthetic ids,
/// advertised node count n0.
pub trait BigIdCtx {
    fn advertised_n(&self) -> usize;
    fn query(&self) -> QueryTarget;
    fn query_degree(&mut self) -> Result<usize, QueryFailure>;
    fn probe(&mut self, id: NodeId, port: Port) -> Result<BigIdAnswer, QueryFailure>;
}

/// An algorithm correct on all graphs with at most n0 nodes carrying unique
/// ids from a large range.
pub trait BigIdAlgorithm {
    fn name(&self) -> &str;
    fn output_alphabet(&self) -> Vec<String>;
    fn run(&self, ctx: &mut dyn BigIdCtx) -> Result<String, QueryFailure>;
}

pub struct LiftViaColoring<A> {
    inner: A,
    n0: usize,
    r: usize,
    delta: usize,
    name: String,
}

impl<A: BigIdAlgorithm> LiftViaColoring<A> {
    pub fn new(inner: A, n0: usize, r: usize, delta: usize) -> Self {
        let name = format!("lift({}, n0={n0})", inner.name());
        LiftViaColoring { inner, n0, r, delta, name }
    }
}

#[derive(Default)]
struct Cache {
    // real id -> (degree, port -> (neighbor, reciprocal))
    nodes: BTreeMap<NodeId, (usize, BTreeMap<Port, (NodeId, Port)>)>,
    synthetic: BTreeMap<NodeId, u64>,
    real_of: BTreeMap<u64, NodeId>,
    inner_touched: BTreeSet<NodeId>,
}

struct Adapter<'c, 'g> {
    ctx: &'c mut QueryCtx<'g>,
    cache: RefCell<Cache>,
    query: QueryTarget,
    k: usize,
    schedule: Vec<(u64, u32)>,
    query_n0: usize,
    real_query_owner: NodeId,
}

impl<'c, 'g> Adapter<'c, 'g> {
    /// Probes every port of `id`, reusing cached answers so each (id, port)
    /// costs at most one oracle call per query.
    fn materialize(&mut self, id: NodeId) -> Result<(), QueryFailure> {
        if self.cache.borrow().nodes.contains_key(&id) {
            return Ok(());
        }
        let first = self.ctx.probe(id, 1)?;
        let degree = first.probed_degree;
        let mut ports = BTreeMap::new();
        ports.insert(1, (first.neighbor_id, first.reciprocal_port));
        for p in 2..=degree {
            let a = self.ctx.probe(id, p)?;
            ports.insert(p, (a.neighbor_id, a.reciprocal_port));
        }
        self.cache.borrow_mut().nodes.insert(id, (degree, ports));
        Ok(())
    }

    /// BFS-probes the radius-R ball around `center`.
    fn ensure_ball(&mut self, center: NodeId, radius: usize) -> Result<Vec<(NodeId, usize)>, QueryFailure> {
        let mut dist: BTreeMap<NodeId, usize> = BTreeMap::new();
        dist.insert(center, 0);
        let mut queue = VecDeque::from([center]);
        while let Some(u) = queue.pop_front() {
            let du = dist[&u];
            if du >= radius {
                continue;
            }
            self.materialize(u)?;
            let ports: Vec<(NodeId, Port)> = {
                let c = self.cache.borrow();
                c.nodes[&u].1.values().cloned().collect()
            };
            for (nb, _) in ports {
                if !dist.contains_key(&nb) {
                    dist.insert(nb, du + 1);
                    queue.push_back(nb);
                }
            }
        }
        Ok(dist.into_iter().collect())
    }

    /// The synthetic id of a real node: its color in the Linial cascade on
    /// G^(n0+r), evaluated inside the radius k*len(schedule) ball.
    fn synthetic(&mut self, id: NodeId) -> Result<u64, QueryFailure> {
        if let Some(&c) = self.cache.borrow().synthetic.get(&id) {
            return Ok(c);
        }
        let rounds = self.schedule.len();
        let radius = self.k * rounds.max(1);
        let ball = self.ensure_ball(id, radius)?;
        let index: BTreeMap<NodeId, usize> =
            ball.iter().enumerate().map(|(i, &(n, _))| (n, i)).collect();
        // Local adjacency among ball nodes.
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); ball.len()];
        {
            let c = self.cache.borrow();
            for (&nid, &i) in index.iter() {
                if let Some((_, ports)) = c.nodes.get(&nid) {
                    for (nb, _) in ports.values() {
                        if let Some(&j) = index.get(nb) {
                            adj[i].push(j);
                        }
                    }
                }
            }
        }
        // Power-graph neighborhoods within the ball.
        let kn = |start: usize| -> Vec<usize> {
            let mut d = BTreeMap::from([(start, 0usize)]);
            let mut q = VecDeque::from([start]);
            let mut out = Vec::new();
            while let Some(x) = q.pop_front() {
                let dx = d[&x];
                if dx >= self.k {
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
        let mut colors: Vec<u128> = ball.iter().map(|&(n, _)| n as u128).collect();
        for &(q, dd) in &self.schedule {
            let next: Vec<u128> = (0..ball.len())
                .map(|i| {
                    let nbr: Vec<u128> = kn(i).into_iter().map(|j| colors[j]).collect();
                    linial_step(colors[i], &nbr, q, dd) as u128
                })
                .collect();
            colors = next;
        }
        let center_color = colors[index[&id]] as u64;
        let mut c = self.cache.borrow_mut();
        c.synthetic.insert(id, center_color);
        if let Some(&other) = c.real_of.get(&center_color) {
            if other != id {
                return Err(QueryFailure::Inconsistent(format!(
                    "synthetic id collision: real {other} and {id} both colored {center_color}"
                )));
            }
        }
        c.real_of.insert(center_color, id);
        Ok(center_color)
    }
}

impl BigIdCtx for Adapter<'_, '_> {
    fn advertised_n(&self) -> usize {
        // This is n0; set when the adapter is built.
        self.query_n0
    }

    fn query(&self) -> QueryTarget {
        self.query
    }

    fn query_degree(&mut self) -> Result<usize, QueryFailure> {
        let owner = self.real_query_owner;
        self.cache.borrow_mut().inner_touched.insert(owner);
        Ok(self.ctx.query_view().degree)
    }

    fn probe(&mut self, id: NodeId, port: Port) -> Result<BigIdAnswer, QueryFailure> {
        let real = {
            let c = self.cache.borrow();
            c.real_of.get(&id).copied()
        }
        .ok_or(QueryFailure::UnknownId { id })?;
        self.materialize(real)?;
        let (degree, target) = {
            let c = self.cache.borrow();
            let (deg, ports) = &c.nodes[&real];
            (*deg, ports.get(&port).cloned())
        };
        let (nb, rp) = target.ok_or(QueryFailure::PortOutOfRange { id, port })?;
        let syn_nb = self.synthetic(nb)?;
        let mut c = self.cache.borrow_mut();
        c.inner_touched.insert(real);
        c.inner_touched.insert(nb);
        Ok(BigIdAnswer { neighbor_id: syn_nb, probed_degree: degree, reciprocal_port: rp })
    }
}

impl<A: BigIdAlgorithm> ProbeAlgorithm for LiftViaColoring<A> {
    fn name(&self) -> &str {
        &self.name
    }

    fn output_alphabet(&self) -> Vec<String> {
        self.inner.output_alphabet()
    }

    fn run(&self, ctx: &mut QueryCtx<'_>) -> Result<String, QueryFailure> {
        let k = self.n0 + self.r;
        let delta_basis = ball_growth_bound(self.delta, k);
        let schedule = cascade_schedule(u128::MAX, delta_basis);
        let real_owner = ctx.query().owner();
        let real_query = ctx.query();
        let mut adapter = Adapter {
            ctx,
            cache: RefCell::new(Cache::default()),
            query: real_query, // rewritten below with the synthetic owner
            k,
            schedule,
            query_n0: self.n0,
            real_query_owner: real_owner,
        };
        let syn_owner = adapter.synthetic(real_owner)?;
        adapter.query = match real_query {
            QueryTarget::Node(_) => QueryTarget::Node(syn_owner),
            QueryTarget::HalfEdge(_, p) => QueryTarget::HalfEdge(syn_owner, p),
        };
        let out = self.inner.run(&mut adapter)?;
        let touched = adapter.cache.borrow().inner_touched.len();
        if touched > self.n0 {
            return Err(QueryFailure::Inconsistent(format!(
                "lifted run touched {touched} nodes, exceeding n0 = {}",
                self.n0
            )));
        }
        Ok(out)
    }
}
