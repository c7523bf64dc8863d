//! Closed-boundary life & death problems: the brute-force oracle that fixes
//! each problem's ground truth, a seeded generator that replaces a curated
//! problem library, and a line-oriented corpus file format.

mod corpus_io;
mod generate;
mod oracle;
mod status;

pub use corpus_io::{load_corpus, save_corpus, CorpusError};
pub use generate::{generate_corpus, generate_problem, GenParams, GenerateError};
pub use oracle::{oracle_solve, OracleError};
pub use status::static_status;
pub(crate) use status::{static_status_within, BudgetExceeded, EvalContext};

use std::fmt;

use crate::goban::{Board, Color, Move, Point};

/// Outcome of a solved position, always expressed for the defender.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Status {
    DefenderLives,
    DefenderDies,
}

impl Status {
    /// The status `color` is trying to reach.
    pub fn goal_of(color: Color, defender: Color) -> Status {
        if color == defender {
            Status::DefenderLives
        } else {
            Status::DefenderDies
        }
    }

    pub fn favorable_to(self, color: Color, defender: Color) -> bool {
        self == Status::goal_of(color, defender)
    }

    pub fn flipped(self) -> Status {
        match self {
            Status::DefenderLives => Status::DefenderDies,
            Status::DefenderDies => Status::DefenderLives,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Status::DefenderLives => "lives",
            Status::DefenderDies => "dies",
        }
    }

    pub fn from_token(s: &str) -> Option<Status> {
        match s {
            "lives" => Some(Status::DefenderLives),
            "dies" => Some(Status::DefenderDies),
            _ => None,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.token())
    }
}

/// A generated life & death problem with its oracle-fixed ground truth.
#[derive(Clone, PartialEq, Debug)]
pub struct Problem {
    pub id: String,
    pub board: Board,
    pub to_move: Color,
    /// A stone of the defender chain whose life is in question.
    pub target: Point,
    pub defender: Color,
    /// The single first move for `to_move` that preserves its optimal
    /// result, when the generator verified one.
    pub unique_winning_move: Option<Move>,
    pub oracle_status: Status,
    /// Difficulty level 1..=14, consistent with `oracle_leaves` under
    /// [`bucket_difficulty`].
    pub difficulty: u8,
    pub oracle_leaves: u64,
}

impl Problem {
    pub fn attacker(&self) -> Color {
        self.defender.opponent()
    }
}

/// An ordered list of problems plus the provenance needed to regenerate it.
#[derive(Clone, PartialEq, Debug)]
pub struct Corpus {
    pub problems: Vec<Problem>,
    pub generator_seed: u64,
    pub generator_version: String,
    /// Content hash over the serialized problem list only.
    pub corpus_hash: u64,
}

impl Corpus {
    pub fn new(problems: Vec<Problem>, generator_seed: u64) -> Corpus {
        let body = corpus_io::serialize_problems(&problems);
        Corpus {
            problems,
            generator_seed,
            generator_version: GENERATOR_VERSION.to_string(),
            corpus_hash: corpus_io::fnv1a64(body.as_bytes()),
        }
    }

    pub fn len(&self) -> usize {
        self.problems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Bumped whenever the generator's draw sequence or acceptance rules change.
pub const GENERATOR_VERSION: &str = "1";

/// Geometric difficulty bucketing over oracle leaf counts.
pub fn bucket_difficulty(oracle_leaves: u64) -> u8 {
    assert!(oracle_leaves >= 1, "leaf counts start at 1");
    let level = 64 - oracle_leaves.leading_zeros() as u64; // 1 + floor(log2(n))
    level.min(14) as u8
}

/// Re-verify a stored problem against the oracle: status, leaf count, and
/// uniqueness of the winning first move.
pub fn verify_problem(problem: &Problem, node_budget: u64) -> Result<(), String> {
    let (status, leaves) = oracle_solve(problem, node_budget).map_err(|e| e.to_string())?;
    if status != problem.oracle_status {
        return Err(format!(
            "oracle status {status} disagrees with stored {}",
            problem.oracle_status
        ));
    }
    if leaves != problem.oracle_leaves {
        return Err(format!(
            "oracle leaves {leaves} disagree with stored {}",
            problem.oracle_leaves
        ));
    }
    let winners = generate::winning_first_moves(
        &problem.board,
        problem.to_move,
        problem.target,
        problem.defender,
        node_budget,
    )
    .map_err(|e| e.to_string())?;
    match problem.unique_winning_move {
        Some(mv) if winners == vec![mv] => Ok(()),
        Some(mv) => Err(format!(
            "stored winning move {mv} but oracle found {winners:?}"
        )),
        None => Ok(()),
    }
}
