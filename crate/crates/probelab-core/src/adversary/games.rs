//! Monte-Carlo endpoints for the duplicate-id and guessing-game bounds.

use crate::rng::Cursor;

#[derive(Debug, Clone, Copy)]
pub struct DuplicateRate {
    pub rate: f64,
    pub birthday_bound: f64,
    pub trials: u64,
}

/// Draws q ids uniformly from [m] per trial and reports the fraction of
/// trials with a repeat, next to the birthday bound q(q-1)/(2m).
pub fn duplicate_id_rate(q: usize, m: u64, trials: u64, seed: u64) -> DuplicateRate {
    assert!(m >= 1);
    let mut cur = Cursor::new(seed, 0x6475_7065);
    let mut hits = 0u64;
    let mut seen = std::collections::HashSet::with_capacity(q * 2);
    for _ in 0..trials {
        seen.clear();
        let mut dup = false;
        for _ in 0..q {
            if !seen.insert(cur.below(m)) {
                dup = true;
                break;
            }
        }
        if dup {
            hits += 1;
        }
    }
    DuplicateRate {
        rate: hits as f64 / trials as f64,
        birthday_bound: (q as f64) * (q as f64 - 1.0) / (2.0 * m as f64),
        trials,
    }
}

/// What the guesser gets to see: nothing correlated with the marks (the
/// parent-port information of the model carries no information about which
/// far slots are marked).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuessStrategy {
    /// The first I indices.
    FirstIndices,
    /// Evenly spread indices.
    Spread,
    /// A fresh seeded random index set per trial.
    SeededRandom,
}

#[derive(Debug, Clone, Copy)]
pub struct GuessRate {
    pub rate: f64,
    pub bound: f64,
    pub trials: u64,
}

/// Per trial, `n_marked` of `n_slots` slots are marked through a random
/// permutation; the strategy outputs an index set of size `i_size` and wins
/// when it hits a mark. The reported bound is i_size * n_marked / n_slots.
pub fn guessing_game(
    n_slots: usize,
    n_marked: usize,
    i_size: usize,
    strategy: GuessStrategy,
    trials: u64,
    seed: u64,
) -> GuessRate {
    assert!(i_size <= n_marked && n_marked <= n_slots);
    let mut cur = Cursor::new(seed, 0x6775_6573);
    let mut wins = 0u64;
    for trial in 0..trials {
        // Random marks via partial Fisher-Yates over slot indices.
        let mut marked = std::collections::HashSet::with_capacity(n_marked * 2);
        while marked.len() < n_marked {
            marked.insert(cur.below(n_slots as u64) as usize);
        }
        let guess: Vec<usize> = match strategy {
            GuessStrategy::FirstIndices => (0..i_size).collect(),
            GuessStrategy::Spread => {
                (0..i_size).map(|i| i * n_slots / i_size).collect()
            }
            GuessStrategy::SeededRandom => {
                let mut g = std::collections::BTreeSet::new();
                let mut c2 = Cursor::new(seed ^ 0x5151, trial);
                while g.len() < i_size {
                    g.insert(c2.below(n_slots as u64) as usize);
                }
                g.into_iter().collect()
            }
        };
        if guess.iter().any(|i| marked.contains(i)) {
            wins += 1;
        }
    }
    GuessRate {
        rate: wins as f64 / trials as f64,
        bound: i_size as f64 * n_marked as f64 / n_slots as f64,
        trials,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_draw_never_collides() {
        let r = duplicate_id_rate(1, 100, 1000, 1);
        assert_eq!(r.rate, 0.0);
    }

    #[test]
    fn two_draws_two_slots_is_about_half() {
        let r = duplicate_id_rate(2, 2, 50_000, 2);
        assert!((r.rate - 0.5).abs() < 0.02, "rate {}", r.rate);
    }

    #[test]
    fn everything_marked_always_wins() {
        let r = guessing_game(10, 10, 1, GuessStrategy::FirstIndices, 500, 3);
        assert_eq!(r.rate, 1.0);
    }

    #[test]
    fn single_mark_single_guess_is_one_over_n() {
        let r = guessing_game(100, 1, 1, GuessStrategy::Spread, 100_000, 4);
        assert!((r.rate - 0.01).abs() < 0.004, "rate {}", r.rate);
    }

    #[test]
    fn strategies_stay_within_triple_bound() {
        for strategy in [GuessStrategy::FirstIndices, GuessStrategy::Spread, GuessStrategy::SeededRandom] {
            let r = guessing_game(10_000, 10, 10, strategy, 10_000, 5);
            assert!(r.rate <= 3.0 * r.bound, "{strategy:?}: {} > 3x{}", r.rate, r.bound);
        }
    }
}
