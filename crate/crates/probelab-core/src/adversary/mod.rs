//! The lower-bound machinery as an executable fooling harness: a lazy
//! infinite host with random non-unique ids, certificate extraction against
//! deterministic coloring algorithms, and the probability-bound experiments.

mod chromatic;
mod fool;
mod games;
mod host;

pub use chromatic::{exact_colorable, gen_high_girth_chromatic, HighGirthReport};
pub use fool::{
    fool_coloring_algorithm, ConstantColorer, FoolConfig, FoolError, FoolOutcome, FoolReport,
    FoolingCertificate, GreedyBfsColorer, ParityGuess,
};
pub use games::{duplicate_id_rate, guessing_game, DuplicateRate, GuessRate, GuessStrategy};
pub use host::{EscapeEvent, HostQuerySource, LazyHost};
