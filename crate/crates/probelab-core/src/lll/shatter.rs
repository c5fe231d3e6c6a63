//! Constant-round pre-shattering and its lazily replayable engine.
//!
//! Every event draws a random color; events whose color repeats within two
//! dependency hops fail and their variables are postponed. The surviving
//! color classes are swept in increasing (color, id) order: each still-unset
//! scope variable draws a candidate value from its tape, and a variable is
//! committed only when no incident event's exact conditional probability
//! would exceed the danger threshold tau; otherwise the offending events are
//! marked dangerous and their unset variables stay postponed forever.
//!
//! The sweep is evaluated through one memoized per-variable-step function
//! (`check_at`) whose recursion walks strictly backwards in sweep time.
//! Global mode folds it over all variables; the query path evaluates it only
//! on the cone of steps the queried event actually depends on. Both modes
//! therefore agree bit for bit.

use super::prob::conditional_probability;
use super::{CriterionKind, Frac, LllInstance, PartialAssignment, VarId};
use crate::rng::Stream;
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ShatterError {
    #[error("polynomial criterion c={0} violated: p={1}, d={2}")]
    CriterionViolated(u32, String, usize),
    #[error("postcondition breached: event {0} has conditional probability {1} > tau' {2}")]
    Postcondition(u64, String, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShatterConfig {
    /// Exponent of the polynomial criterion `p (e d)^c <= 1` required on
    /// entry.
    pub criterion_c: u32,
    /// Color count exponent c': events draw from `max(2,d)^{c'}` colors.
    pub color_exponent: u32,
    /// Danger threshold `tau = max(2,d)^{-lambda}`.
    pub lambda: f64,
    /// Postcondition bound; defaults to `max(tau, p)`.
    pub tau_prime: Option<f64>,
    /// Component cap multiplier: query mode explores at most
    /// `ceil(beta * log2 m)` dangerous events.
    pub beta: f64,
}

impl Default for ShatterConfig {
    fn default() -> Self {
        ShatterConfig {
            criterion_c: 1,
            color_exponent: 5,
            lambda: 0.5,
            tau_prime: None,
            beta: 8.0,
        }
    }
}

impl ShatterConfig {
    pub fn num_colors(&self, d: usize) -> u64 {
        let base = d.max(2) as u64;
        base.saturating_pow(self.color_exponent).min(1 << 40)
    }

    pub fn tau(&self, d: usize) -> f64 {
        (d.max(2) as f64).powf(-self.lambda)
    }

    pub fn component_cap(&self, m: usize) -> usize {
        (self.beta * (m.max(2) as f64).log2()).ceil() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarStatus {
    Committed(u32),
    FrozenByFailure,
    FrozenByMark,
}

/// Result of one variable's sweep step.
#[derive(Debug, Clone, PartialEq, Eq)]
enum StepResult {
    /// Skipped: an incident event failed the coloring, or was marked
    /// dangerous before this step.
    Skipped { by_failure: bool },
    /// The candidate draw would push these incident events above tau.
    Danger(Vec<usize>),
    Committed(u32),
}

/// Sweep time of one variable step: (owner color, owner event id, var id).
type StepKey = (u64, u64, VarId);

/// Deterministic, lazily evaluated pre-shattering state over one instance
/// and seed. Interior mutability holds the memo tables; all outputs are
/// pure functions of (instance, config, seed).
pub struct ShatterEngine<'a> {
    pub inst: &'a LllInstance,
    pub cfg: ShatterConfig,
    pub seed: u64,
    pub d: usize,
    pub num_colors: u64,
    pub tau: f64,
    color_stream: Stream,
    sample_stream: Stream,
    memo: RefCell<Memo>,
    /// Events whose local data has been materialized, with the probes that
    /// cost: 1 for the event's own data plus one per dependency port.
    touched: RefCell<BTreeSet<usize>>,
    probes: RefCell<usize>,
}

#[derive(Default)]
struct Memo {
    failed: BTreeMap<usize, bool>,
    steps: BTreeMap<usize, StepResult>,
    owners: BTreeMap<usize, Option<usize>>,
}

impl<'a> ShatterEngine<'a> {
    pub fn new(inst: &'a LllInstance, cfg: ShatterConfig, seed: u64) -> Result<Self, ShatterError> {
        let report = super::check_criterion(inst, CriterionKind::Polynomial(cfg.criterion_c));
        if !report.holds {
            return Err(ShatterError::CriterionViolated(
                cfg.criterion_c,
                report.p.to_string(),
                report.d,
            ));
        }
        let d = report.d;
        Ok(ShatterEngine {
            inst,
            cfg,
            seed,
            d,
            num_colors: cfg.num_colors(d),
            tau: cfg.tau(d),
            color_stream: Stream::new(seed, 0x434f_4c4f_52),
            sample_stream: Stream::new(seed, 0x5341_4d50_4c45),
            memo: RefCell::new(Memo::default()),
            touched: RefCell::new(BTreeSet::new()),
            probes: RefCell::new(usize::MAX), // disabled until reset
        })
    }

    /// Enables probe metering (query mode).
    pub fn reset_meter(&self) {
        *self.probes.borrow_mut() = 0;
        self.touched.borrow_mut().clear();
    }

    pub fn probes(&self) -> usize {
        let p = *self.probes.borrow();
        if p == usize::MAX {
            0
        } else {
            p
        }
    }

    pub fn touched_events(&self) -> Vec<usize> {
        self.touched.borrow().iter().copied().collect()
    }

    /// Materialization of an event's local data: meters one probe for the
    /// node itself plus one per dependency-graph port.
    fn touch(&self, e: usize) {
        let mut probes = self.probes.borrow_mut();
        if *probes == usize::MAX {
            return;
        }
        if self.touched.borrow_mut().insert(e) {
            *probes += 1 + self.inst.dep_neighbors(e).len();
        }
    }

    pub fn color(&self, e: usize) -> u64 {
        self.touch(e);
        self.color_stream.substream(self.inst.events()[e].id).word(0) % self.num_colors
    }

    /// A node fails when its color is not unique in its 2-hop dependency
    /// neighborhood.
    pub fn failed(&self, e: usize) -> bool {
        if let Some(&f) = self.memo.borrow().failed.get(&e) {
            return f;
        }
        let mine = self.color(e);
        let mut two_hop = BTreeSet::new();
        for &a in self.inst.dep_neighbors(e) {
            two_hop.insert(a);
            for &b in self.inst.dep_neighbors(a) {
                if b != e {
                    two_hop.insert(b);
                }
            }
        }
        let f = two_hop.into_iter().any(|o| self.color(o) == mine);
        self.memo.borrow_mut().failed.insert(e, f);
        f
    }

    /// The event that samples this variable: the non-failed incident event
    /// with the smallest (color, id) key; None when every incident event
    /// failed.
    fn owner(&self, var: usize) -> Option<usize> {
        if let Some(o) = self.memo.borrow().owners.get(&var) {
            return *o;
        }
        let o = self
            .inst
            .events_of_var(var)
            .iter()
            .copied()
            .filter(|&f| !self.failed(f))
            .min_by_key(|&f| (self.color(f), self.inst.events()[f].id));
        self.memo.borrow_mut().owners.insert(var, o);
        o
    }

    fn step_key(&self, var: usize) -> Option<StepKey> {
        let o = self.owner(var)?;
        Some((self.color(o), self.inst.events()[o].id, self.inst.variables()[var].id))
    }

    /// The tape draw for a variable; fixed indexing keeps replays aligned.
    /// Variables outside every event scope take this value directly.
    pub fn tape_value(&self, var: usize) -> u32 {
        let v = &self.inst.variables()[var];
        (self.sample_stream.substream(v.id).word(0) % v.domain as u64) as u32
    }

    fn candidate(&self, var: usize) -> u32 {
        self.tape_value(var)
    }

    /// The core memoized step. Recursion only ever visits strictly earlier
    /// sweep steps, so it terminates, and under random colors the visited
    /// cone stays small.
    fn step(&self, var: usize) -> StepResult {
        if let Some(r) = self.memo.borrow().steps.get(&var) {
            return r.clone();
        }
        let r = self.compute_step(var);
        self.memo.borrow_mut().steps.insert(var, r.clone());
        r
    }

    fn compute_step(&self, var: usize) -> StepResult {
        let incident = self.inst.events_of_var(var);
        if incident.iter().any(|&f| self.failed(f)) {
            return StepResult::Skipped { by_failure: true };
        }
        let key = match self.step_key(var) {
            Some(k) => k,
            None => return StepResult::Skipped { by_failure: true },
        };
        // Frozen by an earlier mark on any incident event?
        for &f in incident {
            if self.marked_before(f, key) {
                return StepResult::Skipped { by_failure: false };
            }
        }
        let cand = self.candidate(var);
        let mut danger = Vec::new();
        for &f in incident {
            let p = self.prob_with(f, key, Some((var, cand)));
            if p.to_f64() > self.tau {
                danger.push(f);
            }
        }
        if danger.is_empty() {
            StepResult::Committed(cand)
        } else {
            StepResult::Danger(danger)
        }
    }

    /// Was `f` marked dangerous at any step strictly before `t`?
    fn marked_before(&self, f: usize, t: StepKey) -> bool {
        self.touch(f);
        for &x in &self.inst.events()[f].vbl {
            let xi = self.inst.var_idx(x).unwrap();
            match self.step_key(xi) {
                Some(k) if k < t => {
                    if let StepResult::Danger(marks) = self.step(xi) {
                        if marks.contains(&f) {
                            return true;
                        }
                    }
                }
                _ => {}
            }
        }
        false
    }

    /// Conditional probability of `f` given all values committed strictly
    /// before `t`, optionally overlaid with one candidate.
    fn prob_with(&self, f: usize, t: StepKey, overlay: Option<(usize, u32)>) -> Frac {
        self.touch(f);
        conditional_probability(self.inst, f, |id| {
            let xi = self.inst.var_idx(id).unwrap();
            if let Some((ov, cand)) = overlay {
                if ov == xi {
                    return Some(cand);
                }
            }
            match self.step_key(xi) {
                Some(k) if k < t => match self.step(xi) {
                    StepResult::Committed(v) => Some(v),
                    _ => None,
                },
                _ => None,
            }
        })
        .expect("scope cap enforced at construction")
    }

    /// Final status of a variable after the whole sweep.
    pub fn var_status(&self, var: usize) -> VarStatus {
        match self.step(var) {
            StepResult::Committed(v) => VarStatus::Committed(v),
            StepResult::Skipped { by_failure: true } => VarStatus::FrozenByFailure,
            _ => VarStatus::FrozenByMark,
        }
    }

    /// Exact conditional probability of an event given the finished sweep.
    pub fn final_prob(&self, e: usize) -> Frac {
        self.touch(e);
        conditional_probability(self.inst, e, |id| {
            let xi = self.inst.var_idx(id).unwrap();
            match self.step(xi) {
                StepResult::Committed(v) => Some(v),
                _ => None,
            }
        })
        .expect("scope cap enforced at construction")
    }

    /// An event is dangerous when its conditional probability is nonzero.
    pub fn dangerous(&self, e: usize) -> bool {
        !self.final_prob(e).is_zero()
    }

    pub fn tau_prime(&self, p: Frac) -> f64 {
        self.cfg.tau_prime.unwrap_or_else(|| self.tau.max(p.to_f64()))
    }
}

#[derive(Debug, Clone)]
pub struct ShatterOutcome {
    pub partial: PartialAssignment,
    /// Events with nonzero conditional probability, by id.
    pub dangerous: Vec<u64>,
    /// Events that failed the 2-hop color uniqueness draw, by id.
    pub color_failed: Vec<u64>,
    pub num_colors: u64,
    pub tau: f64,
}

/// Runs the full sweep and checks the postcondition: every event's exact
/// conditional probability is at most tau'.
pub fn pre_shatter(
    inst: &LllInstance,
    cfg: &ShatterConfig,
    seed: u64,
) -> Result<ShatterOutcome, ShatterError> {
    let engine = ShatterEngine::new(inst, *cfg, seed)?;
    let mut partial = PartialAssignment::default();
    for (vi, v) in inst.variables().iter().enumerate() {
        if inst.events_of_var(vi).is_empty() {
            continue; // untouched
        }
        match engine.var_status(vi) {
            VarStatus::Committed(val) => {
                partial.set.insert(v.id, val);
            }
            _ => {
                partial.frozen.insert(v.id);
            }
        }
    }
    partial.check_invariant();
    let p_max = super::check_criterion(inst, CriterionKind::Polynomial(cfg.criterion_c)).p;
    let tau_prime = engine.tau_prime(p_max);
    let mut dangerous = Vec::new();
    let mut color_failed = Vec::new();
    for (e, ev) in inst.events().iter().enumerate() {
        let p = engine.final_prob(e);
        if p.to_f64() > tau_prime + 1e-9 {
            return Err(ShatterError::Postcondition(ev.id, p.to_string(), tau_prime));
        }
        if !p.is_zero() {
            dangerous.push(ev.id);
        }
        if engine.failed(e) {
            color_failed.push(ev.id);
        }
    }
    Ok(ShatterOutcome {
        partial,
        dangerous,
        color_failed,
        num_colors: engine.num_colors,
        tau: engine.tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lll::testutil::tiny_instance;
    use crate::lll::{event_probability, PartialAssignment};

    #[test]
    fn impossible_events_leave_everything_set() {
        // Events with empty bad sets can never be dangerous.
        let inst = tiny_instance(
            vec![(0, vec![0, 1], vec![]), (1, vec![1, 2], vec![])],
            3,
        );
        let out = pre_shatter(&inst, &ShatterConfig::default(), 7).unwrap();
        assert!(out.dangerous.is_empty());
        assert_eq!(out.partial.set.len(), 3);
        assert!(out.partial.frozen.is_empty());
    }

    #[test]
    fn isolated_small_event_usually_safe() {
        // Single event on 6 bits, bad = all-ones: p = 1/64.
        let inst = tiny_instance(vec![(0, (0..6).collect(), vec![vec![1; 6]])], 6);
        let mut safe = 0;
        for seed in 0..200 {
            let out = pre_shatter(&inst, &ShatterConfig::default(), seed).unwrap();
            if out.dangerous.is_empty() {
                safe += 1;
            } else {
                // Frozen vars belong to the dangerous event.
                assert!(!out.partial.frozen.is_empty());
            }
        }
        assert!(safe >= 150, "only {safe}/200 seeds were safe");
    }

    #[test]
    fn postcondition_holds_on_chain_instances() {
        // A path of events sharing one variable each: p = 1/16, d = 2.
        let events = (0..20u64)
            .map(|i| (i, vec![3 * i, 3 * i + 1, 3 * i + 2, 3 * i + 3], vec![vec![1; 4]]))
            .collect();
        let inst = tiny_instance(events, 61);
        for seed in 0..50 {
            let out = pre_shatter(&inst, &ShatterConfig::default(), seed).unwrap();
            for ev in inst.events() {
                let p = event_probability(&inst, ev.id, &out.partial).unwrap();
                assert!(p.to_f64() <= out.tau + 1e-9);
            }
            // Dangerous events are exactly those with nonzero conditional
            // probability.
            for ev in inst.events() {
                let p = event_probability(&inst, ev.id, &out.partial).unwrap();
                assert_eq!(out.dangerous.contains(&ev.id), !p.is_zero());
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let events = (0..10u64)
            .map(|i| (i, vec![3 * i, 3 * i + 1, 3 * i + 2, 3 * i + 3], vec![vec![1; 4]]))
            .collect();
        let inst = tiny_instance(events, 31);
        let a = pre_shatter(&inst, &ShatterConfig::default(), 3).unwrap();
        let b = pre_shatter(&inst, &ShatterConfig::default(), 3).unwrap();
        assert_eq!(a.partial, b.partial);
        assert_eq!(a.dangerous, b.dangerous);
    }

    #[test]
    fn criterion_gate_refuses_bad_instances() {
        // p = 1/2 with dependencies: polynomial criterion fails.
        let inst = tiny_instance(
            vec![(0, vec![0], vec![vec![1]]), (1, vec![0, 1], vec![vec![0, 0]])],
            2,
        );
        assert!(matches!(
            pre_shatter(&inst, &ShatterConfig::default(), 1),
            Err(ShatterError::CriterionViolated(..))
        ));
    }

    #[test]
    fn partial_respects_invariant_and_freezing_rule() {
        let events = (0..30u64)
            .map(|i| (i, vec![4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3, 4 * i + 4], vec![vec![1; 5]]))
            .collect();
        let inst = tiny_instance(events, 121);
        let out = pre_shatter(&inst, &ShatterConfig::default(), 11).unwrap();
        out.partial.check_invariant();
        // Every frozen variable belongs to some dangerous event.
        for &x in &out.partial.frozen {
            let xi = inst.var_idx(x).unwrap();
            assert!(inst
                .events_of_var(xi)
                .iter()
                .any(|&f| out.dangerous.contains(&inst.events()[f].id)));
        }
        let _ = PartialAssignment::default();
    }
}
