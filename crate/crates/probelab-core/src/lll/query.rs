//! The per-query LCA path and the global reference path.
//!
//! A query replays pre-shattering lazily around the queried event, solves
//! the dangerous components its scope touches (BFS-capped at beta * log2 m
//! events), and returns the scope assignment. Probes are metered as
//! dependency-graph oracle calls: materializing an event costs one probe
//! for its local data plus one per dependency port.

use super::component::{dangerous_components, solve_component};
use super::shatter::{ShatterEngine, VarStatus};
use super::{EventId, LllInstance, PartialAssignment, ShatterConfig, ShatterError, VarId};
use crate::probe::{Outcome, ProbeAnswer, ProbeStep, ProbeTranscript, QueryFailure, QueryTarget};
use crate::rng::Stream;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Debug, Clone)]
pub struct LlQueryOutput {
    /// Assignment of the queried event's scope.
    pub values: BTreeMap<VarId, u32>,
    pub transcript: ProbeTranscript,
}

/// Answers one query: the values of `vbl(event)`. Shared-variable answers
/// agree across queries because the replay engine and the component solver
/// are pure functions of (instance, config, seed).
pub fn lll_query(
    inst: &LllInstance,
    cfg: &ShatterConfig,
    event: EventId,
    seed: u64,
) -> (Result<BTreeMap<VarId, u32>, QueryFailure>, ProbeTranscript) {
    let e = match inst.event_idx(event) {
        Some(e) => e,
        None => {
            let f = QueryFailure::UnknownId { id: event };
            return (Err(f.clone()), failed_transcript(event, f));
        }
    };
    let engine = match ShatterEngine::new(inst, *cfg, seed) {
        Ok(en) => en,
        Err(err) => {
            let f = QueryFailure::Inconsistent(err.to_string());
            return (Err(f.clone()), failed_transcript(event, f));
        }
    };
    engine.reset_meter();
    let result = answer(inst, &engine, cfg, e, seed);
    let transcript = build_transcript(inst, &engine, event, &result);
    (result, transcript)
}

fn answer(
    inst: &LllInstance,
    engine: &ShatterEngine<'_>,
    cfg: &ShatterConfig,
    e: usize,
    seed: u64,
) -> Result<BTreeMap<VarId, u32>, QueryFailure> {
    let scope: Vec<usize> =
        inst.events()[e].vbl.iter().map(|&x| inst.var_idx(x).unwrap()).collect();
    resolve_vars(inst, engine, cfg, &scope, seed)
}

/// Resolves the final values of a variable set against the lazy replay:
/// committed variables read their tape value; postponed ones are answered by
/// canonically solving the dangerous components they touch. Variables in no
/// event take their tape value directly.
pub fn resolve_vars(
    inst: &LllInstance,
    engine: &ShatterEngine<'_>,
    cfg: &ShatterConfig,
    scope: &[usize],
    seed: u64,
) -> Result<BTreeMap<VarId, u32>, QueryFailure> {
    let mut values: BTreeMap<VarId, u32> = BTreeMap::new();
    let mut frozen_vars: Vec<usize> = Vec::new();
    for &xi in scope {
        if inst.events_of_var(xi).is_empty() {
            values.insert(inst.variables()[xi].id, engine.tape_value(xi));
            continue;
        }
        match engine.var_status(xi) {
            VarStatus::Committed(v) => {
                values.insert(inst.variables()[xi].id, v);
            }
            _ => frozen_vars.push(xi),
        }
    }
    if frozen_vars.is_empty() {
        return Ok(values);
    }
    // Every frozen scope variable belongs to at least one dangerous event;
    // explore those components and solve them canonically.
    let cap = cfg.component_cap(inst.events().len());
    let mut solved: BTreeSet<usize> = BTreeSet::new();
    for &xi in &frozen_vars {
        let anchors: Vec<usize> = inst
            .events_of_var(xi)
            .iter()
            .copied()
            .filter(|&f| engine.dangerous(f))
            .collect();
        if anchors.is_empty() {
            return Err(QueryFailure::Inconsistent(format!(
                "frozen variable {} with no dangerous incident event",
                inst.variables()[xi].id
            )));
        }
        for &a in &anchors {
            if solved.contains(&a) {
                continue;
            }
            let component = explore_component(inst, engine, a, cap)?;
            let comp_ids: Vec<EventId> =
                component.iter().map(|&f| inst.events()[f].id).collect();
            let partial = partial_for(inst, engine, &component);
            let sol = solve_component(inst, &partial, &comp_ids, component_seed(seed, &comp_ids))
                .map_err(|err| QueryFailure::Inconsistent(err.to_string()))?;
            for (x, v) in sol {
                let vi = inst.var_idx(x).unwrap();
                if scope.contains(&vi) {
                    values.insert(x, v);
                }
            }
            solved.extend(component);
        }
    }
    // All scope variables answered.
    for &xi in scope {
        let id = inst.variables()[xi].id;
        if !values.contains_key(&id) {
            return Err(QueryFailure::Inconsistent(format!("variable {id} left unassigned")));
        }
    }
    Ok(values)
}

/// BFS over dangerous events, failing once the component exceeds the cap.
fn explore_component(
    inst: &LllInstance,
    engine: &ShatterEngine<'_>,
    start: usize,
    cap: usize,
) -> Result<Vec<usize>, QueryFailure> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let mut comp = Vec::new();
    while let Some(u) = queue.pop_front() {
        comp.push(u);
        if comp.len() > cap {
            return Err(QueryFailure::ComponentTooLarge { size: cap, cap });
        }
        for &w in inst.dep_neighbors(u) {
            if !seen.contains(&w) && engine.dangerous(w) {
                seen.insert(w);
                queue.push_back(w);
            }
        }
    }
    comp.sort_unstable();
    Ok(comp)
}

/// Committed values visible to a component's scope, as a PartialAssignment.
fn partial_for(inst: &LllInstance, engine: &ShatterEngine<'_>, component: &[usize]) -> PartialAssignment {
    let mut partial = PartialAssignment::default();
    for &f in component {
        for &x in &inst.events()[f].vbl {
            let xi = inst.var_idx(x).unwrap();
            match engine.var_status(xi) {
                VarStatus::Committed(v) => {
                    partial.set.insert(x, v);
                }
                _ => {
                    partial.frozen.insert(x);
                }
            }
        }
    }
    partial
}

fn component_seed(seed: u64, comp_ids: &[EventId]) -> u64 {
    // Canonical per-component seed: keyed by the smallest member.
    Stream::new(seed, 0x636f_6d70_7365).substream(comp_ids[0]).word(0)
}

fn failed_transcript(event: EventId, f: QueryFailure) -> ProbeTranscript {
    ProbeTranscript {
        query: QueryTarget::Node(event),
        steps: Vec::new(),
        outcome: Outcome::Failed(f),
    }
}

fn build_transcript(
    inst: &LllInstance,
    engine: &ShatterEngine<'_>,
    event: EventId,
    result: &Result<BTreeMap<VarId, u32>, QueryFailure>,
) -> ProbeTranscript {
    // Port 0 is the local-information fetch; ports 1.. are the dependency
    // edges of the materialized event.
    let mut steps = Vec::new();
    for e in engine.touched_events() {
        let ev = &inst.events()[e];
        let deg = inst.dep_neighbors(e).len();
        steps.push(ProbeStep {
            probed_id: ev.id,
            port: 0,
            answer: ProbeAnswer {
                neighbor_id: ev.id,
                probed_degree: deg,
                reciprocal_port: 0,
                edge_color: None,
                label_here: None,
                label_there: None,
                neighbor_rand_digest: 0,
            },
        });
        for (i, &w) in inst.dep_neighbors(e).iter().enumerate() {
            steps.push(ProbeStep {
                probed_id: ev.id,
                port: i + 1,
                answer: ProbeAnswer {
                    neighbor_id: inst.events()[w].id,
                    probed_degree: deg,
                    reciprocal_port: 0,
                    edge_color: None,
                    label_here: None,
                    label_there: None,
                    neighbor_rand_digest: 0,
                },
            });
        }
    }
    let outcome = match result {
        Ok(values) => Outcome::Output(format!(
            "{}",
            values
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(",")
        )),
        Err(f) => Outcome::Failed(f.clone()),
    };
    ProbeTranscript { query: QueryTarget::Node(event), steps, outcome }
}

/// Global reference path: full pre-shattering, then every dangerous
/// component solved, then scoped-but-untouched and scopeless variables drawn
/// from their tapes. Returns a complete assignment.
pub fn solve_global(
    inst: &LllInstance,
    cfg: &ShatterConfig,
    seed: u64,
) -> Result<BTreeMap<VarId, u32>, ShatterError> {
    let out = super::pre_shatter(inst, cfg, seed)?;
    let mut values: BTreeMap<VarId, u32> = out.partial.set.clone();
    for comp in dangerous_components(inst, &out.dangerous) {
        let sol = solve_component(inst, &out.partial, &comp, component_seed(seed, &comp))
            .expect("solvable under the criterion");
        values.extend(sol);
    }
    let tape = Stream::new(seed, 0x5341_4d50_4c45);
    for v in inst.variables() {
        values
            .entry(v.id)
            .or_insert_with(|| (tape.substream(v.id).word(0) % v.domain as u64) as u32);
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lll::testutil::tiny_instance;
    use crate::lll::{event_probability, Frac};

    fn chain(n: u64) -> LllInstance {
        // p = 1/16, d = 2: the c=1 polynomial criterion holds.
        let events = (0..n)
            .map(|i| (i, vec![3 * i, 3 * i + 1, 3 * i + 2, 3 * i + 3], vec![vec![1; 4]]))
            .collect();
        tiny_instance(events, 3 * n + 1)
    }

    #[test]
    fn global_solution_avoids_every_event() {
        let inst = chain(40);
        for seed in 0..20 {
            let values = solve_global(&inst, &ShatterConfig::default(), seed).unwrap();
            let mut partial = PartialAssignment::default();
            partial.set.extend(values);
            for e in inst.events() {
                assert_eq!(event_probability(&inst, e.id, &partial).unwrap(), Frac::zero());
            }
        }
    }

    #[test]
    fn queries_match_global_mode() {
        let inst = chain(30);
        for seed in 0..10 {
            let global = solve_global(&inst, &ShatterConfig::default(), seed).unwrap();
            for e in inst.events() {
                let (res, t) = lll_query(&inst, &ShatterConfig::default(), e.id, seed);
                let values = res.unwrap();
                for (x, v) in values {
                    assert_eq!(global[&x], v, "event {} seed {seed} var {x}", e.id);
                }
                assert!(t.probe_count() > 0);
            }
        }
    }

    #[test]
    fn shared_variables_agree_across_query_pairs() {
        let inst = chain(24);
        let seed = 9;
        let mut answers: BTreeMap<VarId, u32> = BTreeMap::new();
        for e in inst.events() {
            let (res, _) = lll_query(&inst, &ShatterConfig::default(), e.id, seed);
            for (x, v) in res.unwrap() {
                if let Some(&prev) = answers.get(&x) {
                    assert_eq!(prev, v, "variable {x} answered inconsistently");
                } else {
                    answers.insert(x, v);
                }
            }
        }
    }

    #[test]
    fn unknown_event_fails_cleanly() {
        let inst = chain(3);
        let (res, t) = lll_query(&inst, &ShatterConfig::default(), 999, 0);
        assert!(matches!(res, Err(QueryFailure::UnknownId { .. })));
        assert!(matches!(t.outcome, Outcome::Failed(_)));
    }
}
