//! Moser-Tardos resampling, used as an independent validity oracle.

use super::{LllInstance, VarId};
use crate::rng::Stream;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MtError {
    #[error("resampling cap {0} exceeded; the 4pd criterion is likely violated")]
    CapExceeded(usize),
}

/// Resamples the lowest-id violated event until none is violated.
/// Deterministic given the seed: variable values come from per-variable
/// tapes indexed by resample counts.
pub fn moser_tardos(inst: &LllInstance, seed: u64) -> Result<BTreeMap<VarId, u32>, MtError> {
    let tape = Stream::new(seed, 0x6d74_7461_7065);
    let mut counters: Vec<u64> = vec![0; inst.variables().len()];
    let draw = |vi: usize, counter: u64| -> u32 {
        let v = &inst.variables()[vi];
        (tape.substream(v.id).word(counter) % v.domain as u64) as u32
    };
    let mut values: Vec<u32> = (0..inst.variables().len()).map(|vi| draw(vi, 0)).collect();
    let cap = 10_000 + 50 * inst.events().len();
    let mut iterations = 0usize;
    loop {
        let violated = inst.events().iter().enumerate().find(|(_, e)| {
            let tuple: Vec<u32> =
                e.vbl.iter().map(|&x| values[inst.var_idx(x).unwrap()]).collect();
            e.bad.contains(&tuple)
        });
        match violated {
            None => break,
            Some((_, e)) => {
                iterations += 1;
                if iterations > cap {
                    return Err(MtError::CapExceeded(cap));
                }
                for &x in &e.vbl {
                    let vi = inst.var_idx(x).unwrap();
                    counters[vi] += 1;
                    values[vi] = draw(vi, counters[vi]);
                }
            }
        }
    }
    Ok(inst
        .variables()
        .iter()
        .enumerate()
        .map(|(vi, v)| (v.id, values[vi]))
        .collect())
}

/// Number of resampling steps a run takes; exposed for the expected-work
/// measurements.
pub fn moser_tardos_resamples(inst: &LllInstance, seed: u64) -> Result<usize, MtError> {
    let tape = Stream::new(seed, 0x6d74_7461_7065);
    let mut counters: Vec<u64> = vec![0; inst.variables().len()];
    let draw = |vi: usize, counter: u64| -> u32 {
        let v = &inst.variables()[vi];
        (tape.substream(v.id).word(counter) % v.domain as u64) as u32
    };
    let mut values: Vec<u32> = (0..inst.variables().len()).map(|vi| draw(vi, 0)).collect();
    let cap = 10_000 + 50 * inst.events().len();
    let mut iterations = 0usize;
    loop {
        let violated = inst.events().iter().find(|e| {
            let tuple: Vec<u32> =
                e.vbl.iter().map(|&x| values[inst.var_idx(x).unwrap()]).collect();
            e.bad.contains(&tuple)
        });
        match violated {
            None => return Ok(iterations),
            Some(e) => {
                iterations += 1;
                if iterations > cap {
                    return Err(MtError::CapExceeded(cap));
                }
                for &x in &e.vbl {
                    let vi = inst.var_idx(x).unwrap();
                    counters[vi] += 1;
                    values[vi] = draw(vi, counters[vi]);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lll::testutil::tiny_instance;

    #[test]
    fn no_events_terminates_immediately() {
        let inst = tiny_instance(vec![], 4);
        let a = moser_tardos(&inst, 1).unwrap();
        assert_eq!(a.len(), 4);
    }

    #[test]
    fn single_half_event_mean_resamples_at_most_one() {
        // p = 1/2, d = 0: expected resamples = sum_k (1/2)^k = 1.
        let inst = tiny_instance(vec![(0, vec![0], vec![vec![1]])], 1);
        let mut total = 0usize;
        let trials = 10_000u64;
        for seed in 0..trials {
            total += moser_tardos_resamples(&inst, seed).unwrap();
        }
        let mean = total as f64 / trials as f64;
        assert!(mean <= 1.1, "mean resamples {mean}");
        assert!(mean >= 0.9, "mean resamples {mean}");
    }

    #[test]
    fn deterministic_and_valid() {
        let events = (0..12u64).map(|i| (i, vec![i, i + 1], vec![vec![1, 1]])).collect();
        let inst = tiny_instance(events, 13);
        let a = moser_tardos(&inst, 5).unwrap();
        let b = moser_tardos(&inst, 5).unwrap();
        assert_eq!(a, b);
        for e in inst.events() {
            let tuple: Vec<u32> = e.vbl.iter().map(|&x| a[&x]).collect();
            assert!(!e.bad.contains(&tuple));
        }
    }
}
