//! Solver, trainer and evaluation harness for closed-boundary Go life & death
//! problems.
//!
//! The crate is organized around a small pipeline:
//!
//! * [`goban`] — board representation and rules for small walled-in regions,
//! * [`problems`] — a brute-force oracle plus a seeded problem generator and
//!   the corpus file format,
//! * [`heuristics`] — static board features, dynamic search-memory bonuses and
//!   the weighted move ranking used to order the search,
//! * [`solver`] — the depth-first boolean search with transposition table,
//! * [`fitness`] — the fitness functions that score a weight vector over a
//!   training set,
//! * [`ga`] — the genetic algorithm that learns the weights,
//! * [`cluster`] — master/worker distribution of fitness evaluation,
//! * [`stats`] — the pooled t-test and profile histograms used to validate
//!   leaf counting as a performance measure.

pub mod cluster;
pub mod fitness;
pub mod ga;
pub mod goban;
pub mod heuristics;
pub mod problems;
pub mod seeds;
pub mod solver;
pub mod stats;

pub use goban::{Board, Chain, Color, Move, PlayError, Point};
pub use heuristics::{DynamicWeights, SearchMemory, StaticWeights};
pub use problems::{Corpus, Problem, Status};
pub use solver::{SearchLimits, SearchResult};
