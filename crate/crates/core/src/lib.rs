//! Frequently self-knowingly correct algorithms.
//!
//! * [`election`]: strict-ranking elections, pairwise tallies, Condorcet
//!   winners, deficits and niceness.
//! * [`solvers`]: exact Dodgson scores (deficit-lift dynamic program and a
//!   breadth-first oracle) and the greedy self-knowingly correct heuristics.
//! * [`skc`]: the self-knowingly correct contract, benign algorithm schemes,
//!   the wrapper between them, and the standard uniform distribution.
//! * [`junta`] and [`sat`]: per-length ensembles, junta condition checkers,
//!   the pierced-set construction and a toy SAT language to run it on.
//! * [`mc`]: seeded sampling and Monte Carlo checks of the niceness bounds.
//! * [`cli`]: the `skc` command-line tool.

pub mod bits;
pub mod cli;
pub mod election;
pub mod junta;
pub mod mc;
pub mod sat;
pub mod skc;
pub mod solvers;

pub use bits::BitString;
pub use election::{CandidateId, DodgsonTriple, Election, Vote};
pub use skc::{Flag, SkcOutput};
pub use solvers::Score;
