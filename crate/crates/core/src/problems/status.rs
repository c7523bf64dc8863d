//! Static terminal evaluation shared by the oracle and the heuristic solver.
//!
//! A node is statically decided when the target chain is captured, when it is
//! pass-alive, or after two consecutive passes. The double-pass rule: the
//! defender lives iff the attacker, moving alone from here on, cannot capture
//! the target chain. That capture search is exact (memoized on the stone
//! layout, exploring moves in canonical order) and its nodes are charged to
//! the caller's node budget.

use std::collections::HashMap;

use super::Status;
use crate::goban::{Board, Color, Move, Point};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) struct BudgetExceeded;

/// Node counter with a hard limit, shared across a whole solve.
#[derive(Clone, Copy, Debug)]
pub(crate) struct NodeBudget {
    pub used: u64,
    pub limit: u64,
}

impl NodeBudget {
    pub fn new(limit: u64) -> NodeBudget {
        NodeBudget { used: 0, limit }
    }

    pub fn tick(&mut self) -> Result<(), BudgetExceeded> {
        self.used += 1;
        if self.used > self.limit {
            Err(BudgetExceeded)
        } else {
            Ok(())
        }
    }
}

/// Budget plus caches for the pure per-position facts the evaluation keeps
/// re-deriving. The caches are keyed by the stone layout alone, so they never
/// change any result, only the time to compute it.
pub(crate) struct EvalContext {
    pub budget: NodeBudget,
    alive_cache: HashMap<u64, bool>,
    capture_cache: HashMap<u64, bool>,
}

impl EvalContext {
    pub fn new(node_budget: u64) -> EvalContext {
        EvalContext {
            budget: NodeBudget::new(node_budget),
            alive_cache: HashMap::new(),
            capture_cache: HashMap::new(),
        }
    }

    pub fn tick(&mut self) -> Result<(), BudgetExceeded> {
        self.budget.tick()
    }

    pub fn nodes_used(&self) -> u64 {
        self.budget.used
    }

    pub(crate) fn target_alive(&mut self, board: &Board, target: Point) -> bool {
        let key = board.cells_hash();
        if let Some(&cached) = self.alive_cache.get(&key) {
            return cached;
        }
        let alive = board.is_unconditionally_alive(target);
        self.alive_cache.insert(key, alive);
        alive
    }
}

/// Statically decide a position if possible.
///
/// `double_pass` marks that the last two moves were passes. Returns
/// `Ok(None)` when the node needs further expansion.
pub fn static_status(
    board: &Board,
    target: Point,
    defender: Color,
    double_pass: bool,
) -> Option<Status> {
    let mut ctx = EvalContext::new(u64::MAX);
    static_status_within(board, target, defender, double_pass, &mut ctx)
        .expect("unbounded budget cannot be exceeded")
}

pub(crate) fn static_status_within(
    board: &Board,
    target: Point,
    defender: Color,
    double_pass: bool,
    ctx: &mut EvalContext,
) -> Result<Option<Status>, BudgetExceeded> {
    if board.cell(target) != Some(defender) {
        return Ok(Some(Status::DefenderDies));
    }
    if ctx.target_alive(board, target) {
        return Ok(Some(Status::DefenderLives));
    }
    if double_pass {
        let captured = attacker_can_capture(board, target, defender, ctx)?;
        return Ok(Some(if captured {
            Status::DefenderDies
        } else {
            Status::DefenderLives
        }));
    }
    Ok(None)
}

/// Can the attacker capture the target chain with the defender never
/// responding? Exact search in canonical move order, memoized on the stone
/// layout.
///
/// The search runs on a fresh game line: every attacker move strictly adds a
/// stone while defender stones only disappear, so positions cannot repeat
/// inside the search and the outcome is a pure function of the stone layout.
pub(crate) fn attacker_can_capture(
    board: &Board,
    target: Point,
    defender: Color,
    ctx: &mut EvalContext,
) -> Result<bool, BudgetExceeded> {
    capture_search(&board.fresh_line(), target, defender, ctx)
}

fn capture_search(
    board: &Board,
    target: Point,
    defender: Color,
    ctx: &mut EvalContext,
) -> Result<bool, BudgetExceeded> {
    let attacker = defender.opponent();
    for mv in board.legal_moves(attacker) {
        let Move::Play(_) = mv else { continue };
        ctx.tick()?;
        let child = board.play(attacker, mv).expect("legal move plays");
        if child.cell(target) != Some(defender) {
            return Ok(true);
        }
        if ctx.target_alive(&child, target) {
            continue;
        }
        let key = child.cells_hash();
        let captured = match ctx.capture_cache.get(&key) {
            Some(&cached) => cached,
            None => {
                let result = capture_search(&child, target, defender, ctx)?;
                ctx.capture_cache.insert(key, result);
                result
            }
        };
        if captured {
            return Ok(true);
        }
    }
    Ok(false)
}
