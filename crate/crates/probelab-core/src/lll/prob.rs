//! Exact event probabilities and LLL criterion checks.

use super::{EventId, LllInstance, PartialAssignment};
use thiserror::Error;

/// An exact probability as a reduced fraction. Numerators and denominators
/// stay below 2^24 by the scope cap, so u64 arithmetic never overflows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frac {
    pub num: u64,
    pub den: u64,
}

impl Frac {
    pub fn new(num: u64, den: u64) -> Frac {
        assert!(den > 0);
        let g = gcd(num.max(1), den);
        if num == 0 {
            return Frac { num: 0, den: 1 };
        }
        Frac { num: num / g, den: den / g }
    }

    pub fn zero() -> Frac {
        Frac { num: 0, den: 1 }
    }

    pub fn one() -> Frac {
        Frac { num: 1, den: 1 }
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for Frac {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp_frac(other))
    }
}

impl Ord for Frac {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.cmp_frac(other)
    }
}

impl Frac {
    fn cmp_frac(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl std::fmt::Display for Frac {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProbError {
    #[error("unknown event {0}")]
    UnknownEvent(EventId),
    #[error("scope too large to enumerate: {0} unset combinations exceed 2^24")]
    ScopeTooLarge(u128),
}

/// Exact conditional probability of `event` given the committed values in
/// `partial`, by counting violating assignments of the unset scope
/// variables. Frozen variables are unset.
pub fn event_probability(
    inst: &LllInstance,
    event: EventId,
    partial: &PartialAssignment,
) -> Result<Frac, ProbError> {
    let e = inst.event_idx(event).ok_or(ProbError::UnknownEvent(event))?;
    conditional_probability(inst, e, |id| partial.value(id))
}

/// Closure-based variant used by the shattering engine.
pub fn conditional_probability(
    inst: &LllInstance,
    event_idx: usize,
    value: impl Fn(super::VarId) -> Option<u32>,
) -> Result<Frac, ProbError> {
    let e = &inst.events()[event_idx];
    let mut den: u128 = 1;
    let assigned: Vec<Option<u32>> = e.vbl.iter().map(|&x| value(x)).collect();
    for (pos, &x) in e.vbl.iter().enumerate() {
        if assigned[pos].is_none() {
            let dom = inst.variables()[inst.var_idx(x).unwrap()].domain;
            den = den.saturating_mul(dom as u128);
            if den > (1 << super::MAX_SCOPE) {
                return Err(ProbError::ScopeTooLarge(den));
            }
        }
    }
    // Each violating tuple consistent with the committed values corresponds
    // to exactly one assignment of the unset scope variables.
    let num = e
        .bad
        .iter()
        .filter(|t| t.iter().zip(&assigned).all(|(&tv, a)| a.map_or(true, |v| v == tv)))
        .count() as u64;
    Ok(Frac::new(num, den as u64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionKind {
    /// 4pd <= 1.
    FourPd,
    /// p (e d)^c <= 1.
    Polynomial(u32),
    /// p 2^d <= 1.
    Exponential,
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub kind: CriterionKind,
    pub holds: bool,
    pub p: Frac,
    pub d: usize,
    /// Event attaining p.
    pub binding_event: Option<EventId>,
}

/// Exact criterion evaluation. Any criterion requires p < 1; an instance
/// with no events holds every criterion vacuously.
pub fn check_criterion(inst: &LllInstance, kind: CriterionKind) -> CriterionReport {
    let empty = PartialAssignment::default();
    let mut p = Frac::zero();
    let mut binding = None;
    for e in inst.events() {
        let q = event_probability(inst, e.id, &empty).expect("scope cap enforced");
        if binding.is_none() || q > p {
            p = q;
            binding = Some(e.id);
        }
    }
    let d = inst.dependency_degree();
    let holds = if inst.events().is_empty() {
        true
    } else if p >= Frac::one() {
        false
    } else {
        match kind {
            CriterionKind::FourPd => {
                // 4 p d <= 1 exactly.
                (4u128) * (p.num as u128) * (d as u128) <= p.den as u128
            }
            CriterionKind::Polynomial(c) => {
                let bound = (std::f64::consts::E * d.max(1) as f64).powi(c as i32);
                p.to_f64() * bound <= 1.0
            }
            CriterionKind::Exponential => {
                if d >= 100 {
                    p.is_zero()
                } else {
                    (p.num as u128) << d <= p.den as u128
                }
            }
        }
    };
    CriterionReport { kind, holds, p, d, binding_event: binding }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lll::testutil::tiny_instance;

    #[test]
    fn single_binary_event_is_half() {
        let inst = tiny_instance(vec![(0, vec![0], vec![vec![1]])], 1);
        let p = event_probability(&inst, 0, &PartialAssignment::default()).unwrap();
        assert_eq!(p, Frac::new(1, 2));
    }

    #[test]
    fn all_equal_three_bits_is_quarter() {
        // x1 = x2 = x3 on uniform bits: 2 of 8 assignments.
        let inst = tiny_instance(
            vec![(0, vec![0, 1, 2], vec![vec![0, 0, 0], vec![1, 1, 1]])],
            3,
        );
        let p = event_probability(&inst, 0, &PartialAssignment::default()).unwrap();
        assert_eq!(p, Frac::new(1, 4));
    }

    #[test]
    fn conditioning_can_kill_an_event() {
        // Sinkless-style event at a degree-4 node: all edges inward (value 1).
        let inst = tiny_instance(vec![(0, vec![0, 1, 2, 3], vec![vec![1, 1, 1, 1]])], 4);
        let mut partial = PartialAssignment::default();
        partial.set.insert(2, 0); // one incident edge already set outward
        let p = event_probability(&inst, 0, &partial).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn certain_event_fails_every_criterion() {
        let inst = tiny_instance(vec![(0, vec![0], vec![vec![0], vec![1]])], 1);
        for kind in [CriterionKind::FourPd, CriterionKind::Polynomial(2), CriterionKind::Exponential] {
            let r = check_criterion(&inst, kind);
            assert_eq!(r.p, Frac::one());
            assert!(!r.holds);
        }
    }

    #[test]
    fn empty_event_list_holds_vacuously() {
        let inst = tiny_instance(vec![], 3);
        for kind in [CriterionKind::FourPd, CriterionKind::Polynomial(1), CriterionKind::Exponential] {
            assert!(check_criterion(&inst, kind).holds);
        }
    }

    #[test]
    fn exactness_against_full_enumeration() {
        // Oracle: enumerate all variables of the instance, not just the scope.
        let inst = tiny_instance(
            vec![
                (0, vec![0, 1], vec![vec![1, 1]]),
                (1, vec![1, 2, 3], vec![vec![0, 0, 0], vec![1, 0, 1]]),
            ],
            5,
        );
        let mut partial = PartialAssignment::default();
        partial.set.insert(1, 0);
        for &ev in &[0u64, 1] {
            let fast = event_probability(&inst, ev, &partial).unwrap();
            let slow = brute_force(&inst, ev, &partial);
            assert_eq!(fast, slow);
        }
    }

    /// Independent oracle: enumerate every variable of the instance.
    pub(crate) fn brute_force(
        inst: &LllInstance,
        event: EventId,
        partial: &PartialAssignment,
    ) -> Frac {
        let vars = inst.variables();
        let e = &inst.events()[inst.event_idx(event).unwrap()];
        let mut total = 0u64;
        let mut bad = 0u64;
        let mut assignment = vec![0u32; vars.len()];
        fn rec(
            inst: &LllInstance,
            e: &crate::lll::Event,
            partial: &PartialAssignment,
            i: usize,
            assignment: &mut Vec<u32>,
            total: &mut u64,
            bad: &mut u64,
        ) {
            let vars = inst.variables();
            if i == vars.len() {
                *total += 1;
                let tuple: Vec<u32> = e
                    .vbl
                    .iter()
                    .map(|&x| assignment[inst.var_idx(x).unwrap()])
                    .collect();
                if e.bad.contains(&tuple) {
                    *bad += 1;
                }
                return;
            }
            if let Some(v) = partial.value(vars[i].id) {
                assignment[i] = v;
                rec(inst, e, partial, i + 1, assignment, total, bad);
            } else {
                for v in 0..vars[i].domain {
                    assignment[i] = v;
                    rec(inst, e, partial, i + 1, assignment, total, bad);
                }
            }
        }
        rec(inst, e, partial, 0, &mut assignment, &mut total, &mut bad);
        Frac::new(bad, total)
    }
}
