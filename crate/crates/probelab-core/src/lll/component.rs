//! Dangerous-component discovery and component solving.

use super::prob::conditional_probability;
use super::{EventId, Frac, LllInstance, PartialAssignment, VarId};
use crate::rng::Stream;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComponentError {
    #[error("component unsatisfiable; the caller violated the LLL criterion")]
    ContractBreach,
    #[error("unknown event {0}")]
    UnknownEvent(EventId),
}

/// Connected components of the dependency graph restricted to `dangerous`
/// (event ids). Components are returned sorted by their smallest event id.
pub fn dangerous_components(inst: &LllInstance, dangerous: &[EventId]) -> Vec<Vec<EventId>> {
    let set: BTreeSet<usize> =
        dangerous.iter().filter_map(|&id| inst.event_idx(id)).collect();
    let mut seen = BTreeSet::new();
    let mut components = Vec::new();
    for &start in &set {
        if seen.contains(&start) {
            continue;
        }
        let mut comp = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(u) = queue.pop_front() {
            comp.push(inst.events()[u].id);
            for &w in inst.dep_neighbors(u) {
                if set.contains(&w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components.sort_by_key(|c| c[0]);
    components
}

/// Extends `partial` over all unset variables of the component's events so
/// that every component event becomes impossible. Deterministic given the
/// seed: variables are branched in ascending id with seed-rotated value
/// order, so every query into the same component reconstructs the same
/// assignment.
///
/// Strategy: bounded backtracking, then component-local resampling as a
/// fallback, then exhaustive backtracking.
pub fn solve_component(
    inst: &LllInstance,
    partial: &PartialAssignment,
    component: &[EventId],
    seed: u64,
) -> Result<BTreeMap<VarId, u32>, ComponentError> {
    let comp_idx: Vec<usize> = component
        .iter()
        .map(|&id| inst.event_idx(id).ok_or(ComponentError::UnknownEvent(id)))
        .collect::<Result<_, _>>()?;
    let mut vars: Vec<usize> = comp_idx
        .iter()
        .flat_map(|&e| inst.events()[e].vbl.iter())
        .filter_map(|&x| {
            let xi = inst.var_idx(x).unwrap();
            if partial.value(x).is_none() {
                Some(xi)
            } else {
                None
            }
        })
        .collect();
    vars.sort_unstable();
    vars.dedup();
    if vars.is_empty() {
        // Nothing to assign; the component must already be avoided.
        for &e in &comp_idx {
            if !event_prob_with(inst, e, partial, &BTreeMap::new()).is_zero() {
                return Err(ComponentError::ContractBreach);
            }
        }
        return Ok(BTreeMap::new());
    }
    let tape = Stream::new(seed, 0x636f_6d70);

    if let Some(sol) = backtrack(inst, partial, &comp_idx, &vars, &tape, Some(200_000)) {
        return Ok(sol);
    }
    if let Some(sol) = local_resample(inst, partial, &comp_idx, &vars, &tape) {
        return Ok(sol);
    }
    backtrack(inst, partial, &comp_idx, &vars, &tape, None).ok_or(ComponentError::ContractBreach)
}

fn event_prob_with(
    inst: &LllInstance,
    e: usize,
    partial: &PartialAssignment,
    extra: &BTreeMap<VarId, u32>,
) -> Frac {
    conditional_probability(inst, e, |id| partial.value(id).or_else(|| extra.get(&id).copied()))
        .expect("scope cap enforced")
}

fn backtrack(
    inst: &LllInstance,
    partial: &PartialAssignment,
    comp: &[usize],
    vars: &[usize],
    tape: &Stream,
    node_budget: Option<usize>,
) -> Option<BTreeMap<VarId, u32>> {
    let mut assigned: BTreeMap<VarId, u32> = BTreeMap::new();
    let mut nodes = 0usize;
    fn rec(
        inst: &LllInstance,
        partial: &PartialAssignment,
        comp: &[usize],
        vars: &[usize],
        tape: &Stream,
        depth: usize,
        assigned: &mut BTreeMap<VarId, u32>,
        nodes: &mut usize,
        budget: Option<usize>,
    ) -> Option<bool> {
        // Some(true): solved. Some(false): exhausted subtree. None: budget hit.
        if let Some(b) = budget {
            if *nodes > b {
                return None;
            }
        }
        *nodes += 1;
        if depth == vars.len() {
            let ok = comp
                .iter()
                .all(|&e| event_prob_with(inst, e, partial, assigned).is_zero());
            return Some(ok);
        }
        let vi = vars[depth];
        let v = &inst.variables()[vi];
        let rot = (tape.substream(v.id).word(0) % v.domain as u64) as u32;
        for off in 0..v.domain {
            let val = (rot + off) % v.domain;
            assigned.insert(v.id, val);
            // Prune: an event certain to occur can never be fixed later.
            let doomed = inst.events_of_var(vi).iter().any(|f| {
                comp.contains(f) && event_prob_with(inst, *f, partial, assigned) == Frac::one()
            });
            if !doomed {
                match rec(inst, partial, comp, vars, tape, depth + 1, assigned, nodes, budget) {
                    Some(true) => return Some(true),
                    Some(false) => {}
                    None => return None,
                }
            }
            assigned.remove(&v.id);
        }
        Some(false)
    }
    match rec(inst, partial, comp, vars, tape, 0, &mut assigned, &mut nodes, node_budget) {
        Some(true) => Some(assigned),
        _ => None,
    }
}

/// Moser-Tardos restricted to the component, with an iteration cap.
fn local_resample(
    inst: &LllInstance,
    partial: &PartialAssignment,
    comp: &[usize],
    vars: &[usize],
    tape: &Stream,
) -> Option<BTreeMap<VarId, u32>> {
    let mut counters: BTreeMap<usize, u64> = vars.iter().map(|&v| (v, 1u64)).collect();
    let draw = |vi: usize, c: u64| {
        let v = &inst.variables()[vi];
        (tape.substream(v.id).word(c) % v.domain as u64) as u32
    };
    let mut values: BTreeMap<VarId, u32> = vars
        .iter()
        .map(|&vi| (inst.variables()[vi].id, draw(vi, 1)))
        .collect();
    for _ in 0..10_000 {
        let bad = comp
            .iter()
            .find(|&&e| !event_prob_with(inst, e, partial, &values).is_zero());
        match bad {
            None => return Some(values),
            Some(&e) => {
                for &x in &inst.events()[e].vbl {
                    let xi = inst.var_idx(x).unwrap();
                    if let Some(c) = counters.get_mut(&xi) {
                        *c += 1;
                        values.insert(x, draw(xi, *c));
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lll::testutil::tiny_instance;
    use crate::lll::{event_probability, PartialAssignment};

    #[test]
    fn forced_single_event() {
        // Component of one event "x = 1": the solver must pick x = 0.
        let inst = tiny_instance(vec![(0, vec![0], vec![vec![1]])], 1);
        let sol = solve_component(&inst, &PartialAssignment::default(), &[0], 3).unwrap();
        assert_eq!(sol[&0], 0);
    }

    #[test]
    fn two_events_sharing_a_variable() {
        // Each event excludes one assignment of two bits; enumerate-verified.
        let inst = tiny_instance(
            vec![(0, vec![0, 1], vec![vec![0, 0]]), (1, vec![1, 2], vec![vec![1, 1]])],
            3,
        );
        for seed in 0..16 {
            let sol = solve_component(&inst, &PartialAssignment::default(), &[0, 1], seed).unwrap();
            let mut partial = PartialAssignment::default();
            partial.set.extend(sol);
            for e in inst.events() {
                assert!(event_probability(&inst, e.id, &partial).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn unsat_component_reports_contract_breach() {
        // x = 0 and x = 1 both bad: no assignment avoids both events.
        let inst = tiny_instance(
            vec![(0, vec![0], vec![vec![0]]), (1, vec![0], vec![vec![1]])],
            1,
        );
        assert_eq!(
            solve_component(&inst, &PartialAssignment::default(), &[0, 1], 0),
            Err(ComponentError::ContractBreach)
        );
    }

    #[test]
    fn component_discovery_respects_dependencies() {
        let inst = tiny_instance(
            vec![
                (0, vec![0, 1], vec![vec![1, 1]]),
                (1, vec![1, 2], vec![vec![1, 1]]),
                (2, vec![5, 6], vec![vec![1, 1]]),
            ],
            7,
        );
        let comps = dangerous_components(&inst, &[0, 1, 2]);
        assert_eq!(comps, vec![vec![0, 1], vec![2]]);
    }
}
