//! Brute-force reference solver: boolean minimax in a fixed canonical move
//! order, no heuristics, no transposition table. Its results are the ground
//! truth the heuristic solver is judged against, and its leaf counts define
//! problem difficulty.

use std::fmt;

use super::status::{static_status_within, BudgetExceeded, EvalContext};
use super::{Problem, Status};
use crate::goban::{Board, Color, Point};

/// Hard cap on line length; candidates needing deeper lines are rejected at
/// generation time.
const ORACLE_MAX_DEPTH: u32 = 100;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OracleError {
    /// The problem could not be solved within the node budget.
    BudgetExceeded,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "oracle node budget exceeded")
    }
}

impl std::error::Error for OracleError {}

#[derive(Clone, Copy, Debug)]
pub(crate) struct OracleOutcome {
    pub status: Status,
    pub leaves: u64,
    pub nodes: u64,
    pub max_depth: u32,
}

/// Exact status of a problem plus the terminal-leaf count of the search.
pub fn oracle_solve(problem: &Problem, node_budget: u64) -> Result<(Status, u64), OracleError> {
    assert!(node_budget > 0, "node budget must be positive");
    let mut ctx = EvalContext::new(node_budget);
    let outcome = solve_within(
        &problem.board,
        problem.to_move,
        problem.target,
        problem.defender,
        0,
        &mut ctx,
    )?;
    Ok((outcome.status, outcome.leaves))
}

/// Oracle entry point that shares one node budget across several calls, so a
/// generation candidate's total verification cost stays bounded.
pub(crate) fn solve_within(
    board: &Board,
    to_move: Color,
    target: Point,
    defender: Color,
    initial_pass_streak: u8,
    ctx: &mut EvalContext,
) -> Result<OracleOutcome, OracleError> {
    let mut stats = Stats {
        leaves: 0,
        max_depth: 0,
    };
    let start = ctx.nodes_used();
    let status = search(
        board,
        to_move,
        initial_pass_streak,
        0,
        target,
        defender,
        ctx,
        &mut stats,
    )
    .map_err(|BudgetExceeded| OracleError::BudgetExceeded)?;
    Ok(OracleOutcome {
        status,
        leaves: stats.leaves,
        nodes: ctx.nodes_used() - start,
        max_depth: stats.max_depth,
    })
}

struct Stats {
    leaves: u64,
    max_depth: u32,
}

#[allow(clippy::too_many_arguments)]
fn search(
    board: &Board,
    side: Color,
    pass_streak: u8,
    depth: u32,
    target: Point,
    defender: Color,
    ctx: &mut EvalContext,
    stats: &mut Stats,
) -> Result<Status, BudgetExceeded> {
    ctx.tick()?;
    if depth > ORACLE_MAX_DEPTH {
        return Err(BudgetExceeded);
    }
    stats.max_depth = stats.max_depth.max(depth);
    if let Some(status) =
        static_status_within(board, target, defender, pass_streak >= 2, ctx)?
    {
        stats.leaves += 1;
        return Ok(status);
    }
    for mv in board.legal_moves(side) {
        let child = board.play(side, mv).expect("legal move plays");
        let streak = if mv.is_pass() { pass_streak + 1 } else { 0 };
        let status = search(
            &child,
            side.opponent(),
            streak,
            depth + 1,
            target,
            defender,
            ctx,
            stats,
        )?;
        if status.favorable_to(side, defender) {
            return Ok(status);
        }
    }
    Ok(Status::goal_of(side, defender).flipped())
}
