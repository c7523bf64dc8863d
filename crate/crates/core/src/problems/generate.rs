//! Seeded random problem generation. Each candidate gets its own rng stream
//! derived from (seed, attempt index), so generation is reproducible and can
//! be spread across threads with an order-stable result.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oracle::{solve_within, OracleError};
use super::status::{static_status, EvalContext};
use super::{bucket_difficulty, Corpus, Problem, Status};
use crate::goban::{Board, BoardBuilder, Color, Move, Point};

/// Deepest oracle line a candidate may need; keeps accepted problems well
/// inside the solver's default depth limit.
const MAX_ACCEPTED_DEPTH: u32 = 40;

/// Share of interior stones drawn for the defender.
const DEFENDER_STONE_BIAS: f64 = 0.62;

#[derive(Clone, Copy, Debug)]
pub struct GenParams {
    /// Full board width including the wall ring.
    pub width: u8,
    /// Full board height including the wall ring.
    pub height: u8,
    /// Probability that an interior point holds a stone.
    pub stone_density: f64,
    pub defender: Color,
    /// Total oracle budget per candidate, covering the root solve and the
    /// winning-move verification solves.
    pub node_budget: u64,
    /// Accepted difficulty levels, checked before the expensive uniqueness
    /// verification.
    pub level_range: Option<(u8, u8)>,
}

impl Default for GenParams {
    fn default() -> GenParams {
        GenParams {
            width: 7,
            height: 7,
            stone_density: 0.5,
            defender: Color::Black,
            node_budget: 5_000_000,
            level_range: None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GenerateError {
    /// The attempt cap was reached before enough problems were accepted.
    AttemptsExhausted { accepted: usize, wanted: usize, attempts: u64 },
}

impl fmt::Display for GenerateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenerateError::AttemptsExhausted {
                accepted,
                wanted,
                attempts,
            } => write!(
                f,
                "accepted only {accepted} of {wanted} problems after {attempts} attempts"
            ),
        }
    }
}

impl std::error::Error for GenerateError {}

/// One generation attempt. `None` is a rejection; the caller retries with the
/// next derived rng stream.
pub fn generate_problem(rng: &mut ChaCha8Rng, params: &GenParams) -> Option<Problem> {
    assert!(
        params.width >= 4 && params.height >= 4,
        "need at least a 2x2 interior inside the wall"
    );
    let id = format!("p{:016x}", rng.random::<u64>());
    let attacker = params.defender.opponent();

    let mut builder = BoardBuilder::new(params.width, params.height);
    for y in 0..params.height {
        for x in 0..params.width {
            if x == 0 || y == 0 || x == params.width - 1 || y == params.height - 1 {
                builder.set(Point::new(x, y), attacker, true);
            }
        }
    }
    for y in 1..params.height - 1 {
        for x in 1..params.width - 1 {
            if rng.random_bool(params.stone_density) {
                let color = if rng.random_bool(DEFENDER_STONE_BIAS) {
                    params.defender
                } else {
                    attacker
                };
                builder.set(Point::new(x, y), color, false);
            }
        }
    }
    let drawn_side = if rng.random_bool(0.5) {
        params.defender
    } else {
        attacker
    };

    let board = builder.finish(drawn_side).ok()?;
    let target = largest_defender_chain(&board, params.defender)?;

    // Statically decided roots are degenerate problems.
    if static_status(&board, target, params.defender, false).is_some() {
        return None;
    }

    // Cheap screening pass with the transposition-table solver; candidates
    // that survive get their ground truth fixed by the oracle below.
    let mut filter = CandidateFilter::new(params);
    let mut to_move = drawn_side;
    let mut board = board;
    if !filter.side_wins(&board, to_move, target)? {
        // The drawn side loses even moving first, so the other side wins
        // moving first (passing is always available). Flip the problem.
        to_move = to_move.opponent();
        board = builder.finish(to_move).ok()?;
        if !filter.side_wins(&board, to_move, target)? {
            return None;
        }
    }
    if !filter.unique_winner(&board, to_move, target)? {
        return None;
    }

    let mut ctx = EvalContext::new(params.node_budget);
    let root = solve_within(&board, to_move, target, params.defender, 0, &mut ctx).ok()?;
    if root.max_depth > MAX_ACCEPTED_DEPTH {
        return None;
    }
    if !root.status.favorable_to(to_move, params.defender) {
        return None;
    }
    let difficulty = bucket_difficulty(root.leaves);
    if let Some((lo, hi)) = params.level_range {
        if difficulty < lo || difficulty > hi {
            return None;
        }
    }
    let winners =
        winning_moves_within(&board, to_move, target, params.defender, 2, &mut ctx).ok()?;
    let [winner] = winners.as_slice() else {
        return None;
    };

    Some(Problem {
        id,
        board,
        to_move,
        target,
        defender: params.defender,
        unique_winning_move: Some(*winner),
        oracle_status: root.status,
        difficulty,
        oracle_leaves: root.leaves,
    })
}

/// Screens candidates with the heuristic-free solver before any oracle time
/// is spent. Rejections here only shape which candidates reach the oracle;
/// every stored fact about an accepted problem still comes from the oracle.
struct CandidateFilter {
    solver: crate::solver::Solver,
    limits: crate::solver::SearchLimits,
    defender: Color,
}

impl CandidateFilter {
    fn new(params: &GenParams) -> CandidateFilter {
        CandidateFilter {
            solver: crate::solver::Solver::new(),
            limits: crate::solver::SearchLimits {
                max_depth: 48,
                node_budget: params.node_budget,
            },
            defender: params.defender,
        }
    }

    fn status_of(&mut self, board: &Board, to_move: Color, target: Point) -> Option<Status> {
        let scratch = Problem {
            id: String::new(),
            board: board.clone(),
            to_move,
            target,
            defender: self.defender,
            unique_winning_move: None,
            oracle_status: Status::DefenderLives,
            difficulty: 1,
            oracle_leaves: 1,
        };
        let zeros = crate::heuristics::StaticWeights::zeros();
        let dw = crate::heuristics::DynamicWeights::zeros();
        self.solver
            .solve_reusing_table(&scratch, &zeros, &dw, self.limits)
            .ok()
            .map(|r| r.status)
    }

    /// None = candidate too hard for the screening budget.
    fn side_wins(&mut self, board: &Board, to_move: Color, target: Point) -> Option<bool> {
        let status = self.status_of(board, to_move, target)?;
        Some(status.favorable_to(to_move, self.defender))
    }

    fn unique_winner(&mut self, board: &Board, to_move: Color, target: Point) -> Option<bool> {
        let goal = Status::goal_of(to_move, self.defender);
        let mut winners = 0;
        for mv in board.legal_moves(to_move) {
            let child = board.play(to_move, mv).expect("legal move plays");
            // A first-move pass leaves the pass streak at one; the screening
            // solver cannot express that, so solve the child as a fresh
            // root. The oracle verification below is streak-exact, so a
            // rare screening mismatch only costs a candidate.
            let status = self.status_of(&child, to_move.opponent(), target)?;
            if status == goal {
                winners += 1;
                if winners > 1 {
                    return Some(false);
                }
            }
        }
        Some(winners == 1)
    }
}

/// First moves after which `to_move` still reaches its goal, in canonical
/// order, stopping once `limit` winners are found.
pub(crate) fn winning_first_moves(
    board: &Board,
    to_move: Color,
    target: Point,
    defender: Color,
    node_budget: u64,
) -> Result<Vec<Move>, OracleError> {
    let mut ctx = EvalContext::new(node_budget);
    winning_moves_within(board, to_move, target, defender, usize::MAX, &mut ctx)
}

fn winning_moves_within(
    board: &Board,
    to_move: Color,
    target: Point,
    defender: Color,
    limit: usize,
    ctx: &mut EvalContext,
) -> Result<Vec<Move>, OracleError> {
    let goal = Status::goal_of(to_move, defender);
    let mut winners = Vec::new();
    for mv in board.legal_moves(to_move) {
        let child = board.play(to_move, mv).expect("legal move plays");
        let streak = u8::from(mv.is_pass());
        let outcome = solve_within(&child, to_move.opponent(), target, defender, streak, ctx)?;
        if outcome.max_depth + 1 > MAX_ACCEPTED_DEPTH {
            return Err(OracleError::BudgetExceeded);
        }
        if outcome.status == goal {
            winners.push(mv);
            if winners.len() >= limit {
                break;
            }
        }
    }
    Ok(winners)
}

fn largest_defender_chain(board: &Board, defender: Color) -> Option<Point> {
    board
        .chains()
        .into_iter()
        .filter(|c| c.color == defender && !c.immortal)
        .max_by_key(|c| c.points.len()) // ties keep the earliest chain
        .map(|c| c.points[0])
}

/// Generate `count` problems, optionally restricted to a difficulty range.
///
/// Attempt `i` always uses the rng stream derived from `(seed, i)` and
/// acceptance scans attempts in order, so the result is a pure function of
/// the arguments no matter how many worker threads run the attempts.
pub fn generate_corpus(
    seed: u64,
    count: usize,
    params: &GenParams,
    level_range: Option<(u8, u8)>,
    max_attempts: u64,
    threads: usize,
) -> Result<Corpus, GenerateError> {
    let threads = threads.max(1);
    let params = GenParams {
        level_range: level_range.or(params.level_range),
        ..*params
    };
    let stream_base = crate::seeds::derive(seed, crate::seeds::CORPUS);
    let mut problems: Vec<Problem> = Vec::with_capacity(count);
    let mut attempts: u64 = 0;
    while problems.len() < count {
        if attempts >= max_attempts {
            return Err(GenerateError::AttemptsExhausted {
                accepted: problems.len(),
                wanted: count,
                attempts,
            });
        }
        let batch = (threads as u64 * 8).min(max_attempts - attempts);
        let batch_results = run_batch(stream_base, attempts, batch, &params, threads);
        attempts += batch;
        for problem in batch_results.into_iter().flatten() {
            if problems.len() >= count {
                break;
            }
            if problems.iter().any(|p| p.id == problem.id) {
                continue;
            }
            problems.push(problem);
        }
    }
    Ok(Corpus::new(problems, seed))
}

/// Run attempts `[first, first+batch)` across `threads` workers, results in
/// attempt order.
fn run_batch(
    stream_base: u64,
    first: u64,
    batch: u64,
    params: &GenParams,
    threads: usize,
) -> Vec<Option<Problem>> {
    let indices: Vec<u64> = (first..first + batch).collect();
    if threads <= 1 || indices.len() <= 1 {
        return indices
            .iter()
            .map(|&i| attempt(stream_base, i, params))
            .collect();
    }
    let chunk = indices.len().div_ceil(threads);
    let mut out: Vec<Option<Problem>> = Vec::with_capacity(indices.len());
    std::thread::scope(|scope| {
        let handles: Vec<_> = indices
            .chunks(chunk)
            .map(|slice| {
                scope.spawn(move || {
                    slice
                        .iter()
                        .map(|&i| attempt(stream_base, i, params))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for handle in handles {
            out.extend(handle.join().expect("generation worker panicked"));
        }
    });
    out
}

fn attempt(stream_base: u64, index: u64, params: &GenParams) -> Option<Problem> {
    let mut rng = ChaCha8Rng::seed_from_u64(crate::seeds::derive(stream_base, index));
    generate_problem(&mut rng, params)
}
