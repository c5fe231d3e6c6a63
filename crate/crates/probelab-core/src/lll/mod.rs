//! Distributed Lovász Local Lemma instances and solvers.

mod component;
mod io;
mod moser_tardos;
mod prob;
mod query;
mod shatter;

pub use component::{dangerous_components, solve_component, ComponentError};
pub use io::{instance_from_json, instance_to_json, InstanceFormatError};
pub use moser_tardos::{moser_tardos, moser_tardos_resamples, MtError};
pub use prob::{check_criterion, event_probability, CriterionKind, CriterionReport, Frac, ProbError};
pub use query::{lll_query, resolve_vars, solve_global, LlQueryOutput};
pub use shatter::{pre_shatter, ShatterConfig, ShatterEngine, ShatterError, ShatterOutcome, VarStatus};

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub type VarId = u64;
pub type EventId = u64;

/// Hard cap on event scope: conditional probabilities are computed exactly
/// by scanning explicit bad sets, and domains are enumerated up to 2^24
/// combinations.
pub const MAX_SCOPE: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub id: VarId,
    /// Values are `0..domain`, uniform.
    pub domain: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub id: EventId,
    /// Ordered variable scope.
    pub vbl: Vec<VarId>,
    /// Explicit violating assignments, one value per scope position.
    pub bad: Vec<Vec<u32>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LllError {
    #[error("event {0} references unknown variable {1}")]
    UnknownVariable(EventId, VarId),
    #[error("event {0} scope has {1} variables, cap is {MAX_SCOPE}")]
    ScopeTooLarge(EventId, usize),
    #[error("event {0} bad tuple has wrong arity")]
    BadArity(EventId),
    #[error("event {0} bad tuple value out of domain")]
    BadValue(EventId),
    #[error("duplicate event id {0}")]
    DuplicateEvent(EventId),
    #[error("duplicate variable id {0}")]
    DuplicateVariable(VarId),
    #[error("variable {0} has empty domain")]
    EmptyDomain(VarId),
}

/// Finite-domain variables plus events with explicit violating assignments.
/// The dependency graph (edge iff scopes intersect) is derived once at
/// construction.
#[derive(Debug, Clone)]
pub struct LllInstance {
    variables: Vec<Variable>,
    events: Vec<Event>,
    var_index: BTreeMap<VarId, usize>,
    event_index: BTreeMap<EventId, usize>,
    /// Events (indices) containing each variable.
    var_events: Vec<Vec<usize>>,
    /// Dependency adjacency over event indices.
    dep_adj: Vec<Vec<usize>>,
}

impl LllInstance {
    pub fn new(mut variables: Vec<Variable>, mut events: Vec<Event>) -> Result<Self, LllError> {
        variables.sort_by_key(|v| v.id);
        events.sort_by_key(|e| e.id);
        let mut var_index = BTreeMap::new();
        for (i, v) in variables.iter().enumerate() {
            if v.domain == 0 {
                return Err(LllError::EmptyDomain(v.id));
            }
            if var_index.insert(v.id, i).is_some() {
                return Err(LllError::DuplicateVariable(v.id));
            }
        }
        let mut event_index = BTreeMap::new();
        for (i, e) in events.iter().enumerate() {
            if event_index.insert(e.id, i).is_some() {
                return Err(LllError::DuplicateEvent(e.id));
            }
            if e.vbl.len() > MAX_SCOPE {
                return Err(LllError::ScopeTooLarge(e.id, e.vbl.len()));
            }
            for &x in &e.vbl {
                if !var_index.contains_key(&x) {
                    return Err(LllError::UnknownVariable(e.id, x));
                }
            }
            for t in &e.bad {
                if t.len() != e.vbl.len() {
                    return Err(LllError::BadArity(e.id));
                }
                for (pos, &val) in t.iter().enumerate() {
                    let dom = variables[var_index[&e.vbl[pos]]].domain;
                    if val >= dom {
                        return Err(LllError::BadValue(e.id));
                    }
                }
            }
        }
        let mut var_events = vec![Vec::new(); variables.len()];
        for (i, e) in events.iter().enumerate() {
            for &x in &e.vbl {
                var_events[var_index[&x]].push(i);
            }
        }
        let mut dep_adj = vec![BTreeSet::new(); events.len()];
        for evs in &var_events {
            for &a in evs {
                for &b in evs {
                    if a != b {
                        dep_adj[a].insert(b);
                    }
                }
            }
        }
        let dep_adj = dep_adj.into_iter().map(|s| s.into_iter().collect()).collect();
        Ok(LllInstance { variables, events, var_index, event_index, var_events, dep_adj })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn var_idx(&self, id: VarId) -> Option<usize> {
        self.var_index.get(&id).copied()
    }

    pub fn event_idx(&self, id: EventId) -> Option<usize> {
        self.event_index.get(&id).copied()
    }

    pub fn events_of_var(&self, var: usize) -> &[usize] {
        &self.var_events[var]
    }

    pub fn dep_neighbors(&self, event: usize) -> &[usize] {
        &self.dep_adj[event]
    }

    /// Max dependency degree d.
    pub fn dependency_degree(&self) -> usize {
        self.dep_adj.iter().map(|l| l.len()).max().unwrap_or(0)
    }
}

/// A partial assignment: committed values plus variables postponed by
/// pre-shattering. The two sets are disjoint; scoped variables outside both
/// are untouched.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialAssignment {
    pub set: BTreeMap<VarId, u32>,
    pub frozen: BTreeSet<VarId>,
}

impl PartialAssignment {
    pub fn value(&self, id: VarId) -> Option<u32> {
        self.set.get(&id).copied()
    }

    pub fn is_frozen(&self, id: VarId) -> bool {
        self.frozen.contains(&id)
    }

    pub fn check_invariant(&self) {
        for k in self.set.keys() {
            assert!(!self.frozen.contains(k), "set and frozen must be disjoint");
        }
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    /// One uniform binary variable per edge-like pair, one event forcing
    /// specific assignments; small helper for unit tests.
    pub fn tiny_instance(events: Vec<(EventId, Vec<VarId>, Vec<Vec<u32>>)>, nvars: u64) -> LllInstance {
        let variables = (0..nvars).map(|id| Variable { id, domain: 2 }).collect();
        let events = events
            .into_iter()
            .map(|(id, vbl, bad)| Event { id, vbl, bad })
            .collect();
        LllInstance::new(variables, events).unwrap()
    }
}
