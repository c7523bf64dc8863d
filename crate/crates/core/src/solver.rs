//! Depth-first boolean search with heuristic move ordering.
//!
//! The search is exact: move ordering (and the transposition table) only
//! changes how much of the tree is visited, never the status. Its cost is
//! reported as terminal leaves — nodes closed by static evaluation.
//! Transposition hits do not count as leaves.
//!
//! Three mechanisms are hard-wired (always on, not weight-gated):
//! transposition lookup/store, promotion of the refuting reply to the front
//! of the remaining untried moves after a failed move, and the search-memory
//! updates (win counts, the parent's top-2 moves, per-depth winners).

use std::collections::VecDeque;
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::goban::{Board, Color, Move, Point};
use crate::heuristics::{rank_moves, DynamicWeights, NodeContext, SearchMemory, StaticWeights};
use crate::problems::{static_status_within, BudgetExceeded, EvalContext, Problem, Status};

/// Default transposition capacity: 2^20 entries, always-replace.
pub const TT_CAPACITY: usize = 1 << 20;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SearchLimits {
    pub max_depth: u32,
    pub node_budget: u64,
}

impl SearchLimits {
    /// Budget used while training weight vectors.
    pub fn training() -> SearchLimits {
        SearchLimits {
            max_depth: 48,
            node_budget: 2_000_000,
        }
    }

    /// Budget used when measuring a weight vector on a test set.
    pub fn testing() -> SearchLimits {
        SearchLimits {
            max_depth: 48,
            node_budget: 20_000_000,
        }
    }
}

impl Default for SearchLimits {
    fn default() -> SearchLimits {
        SearchLimits::training()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub status: Status,
    /// Nodes closed by static evaluation.
    pub terminal_leaves: u64,
    /// All nodes charged to the budget, including the static evaluation's
    /// internal capture searches.
    pub nodes: u64,
    pub principal_move: Move,
    /// Wall-clock time; recorded for the statistics module, never consulted
    /// by any decision in the search.
    pub elapsed: Duration,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SolveError {
    BudgetExceeded { nodes: u64 },
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::BudgetExceeded { nodes } => {
                write!(f, "search budget exceeded after {nodes} nodes")
            }
        }
    }
}

impl std::error::Error for SolveError {}

#[derive(Clone, Copy)]
struct TtSlot {
    key: u64,
    stamp: u32,
    /// Was this node reached with one pass already on the streak? Statuses
    /// are only trusted when the flag matches; the stored move still serves
    /// as an ordering suggestion.
    streak1: bool,
    status: Option<Status>,
    best: Move,
}

/// Fixed-capacity always-replace transposition table. Clearing is O(1) via a
/// generation stamp, so one table serves a whole corpus run.
pub struct TranspositionTable {
    slots: Vec<TtSlot>,
    mask: usize,
    stamp: u32,
}

pub(crate) struct TtProbe {
    pub streak1: bool,
    pub status: Option<Status>,
    pub best: Move,
}

impl TranspositionTable {
    pub fn new() -> TranspositionTable {
        TranspositionTable::with_capacity(TT_CAPACITY)
    }

    pub fn with_capacity(capacity: usize) -> TranspositionTable {
        assert!(capacity.is_power_of_two());
        TranspositionTable {
            slots: vec![
                TtSlot {
                    key: 0,
                    stamp: 0,
                    streak1: false,
                    status: None,
                    best: Move::Pass,
                };
                capacity
            ],
            mask: capacity - 1,
            stamp: 1,
        }
    }

    pub fn clear(&mut self) {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            for slot in &mut self.slots {
                slot.stamp = 0;
            }
            self.stamp = 1;
        }
    }

    fn probe(&self, key: u64) -> Option<TtProbe> {
        let slot = &self.slots[key as usize & self.mask];
        (slot.stamp == self.stamp && slot.key == key).then_some(TtProbe {
            streak1: slot.streak1,
            status: slot.status,
            best: slot.best,
        })
    }

    fn store(&mut self, key: u64, streak1: bool, status: Option<Status>, best: Move) {
        self.slots[key as usize & self.mask] = TtSlot {
            key,
            stamp: self.stamp,
            streak1,
            status,
            best,
        };
    }
}

impl Default for TranspositionTable {
    fn default() -> Self {
        TranspositionTable::new()
    }
}

thread_local! {
    static NODES_EXPANDED: std::cell::Cell<u64> = const { std::cell::Cell::new(0) };
}

/// Count of solver node expansions on the current thread, for tests that
/// assert a code path performed no search at all.
pub fn nodes_expanded_total() -> u64 {
    NODES_EXPANDED.with(|n| n.get())
}

/// A reusable solver instance: one transposition table and one search memory,
/// cleared between problems.
pub struct Solver {
    tt: Option<TranspositionTable>,
    mem: SearchMemory,
}

impl Solver {
    pub fn new() -> Solver {
        Solver {
            tt: Some(TranspositionTable::new()),
            mem: SearchMemory::new(),
        }
    }

    /// A solver with the transposition table disabled; statuses must not
    /// change, only leaf counts.
    pub fn without_tt() -> Solver {
        Solver {
            tt: None,
            mem: SearchMemory::new(),
        }
    }

    pub fn solve(
        &mut self,
        problem: &Problem,
        sw: &StaticWeights,
        dw: &DynamicWeights,
        limits: SearchLimits,
    ) -> Result<SearchResult, SolveError> {
        self.solve_impl(problem, sw, dw, limits, true)
    }

    /// Solve without clearing the transposition table, sharing entries with
    /// earlier solves. Used by the generator's screening pass, where the
    /// children of a just-solved root transpose heavily into it.
    pub(crate) fn solve_reusing_table(
        &mut self,
        problem: &Problem,
        sw: &StaticWeights,
        dw: &DynamicWeights,
        limits: SearchLimits,
    ) -> Result<SearchResult, SolveError> {
        self.solve_impl(problem, sw, dw, limits, false)
    }

    fn solve_impl(
        &mut self,
        problem: &Problem,
        sw: &StaticWeights,
        dw: &DynamicWeights,
        limits: SearchLimits,
        clear_tt: bool,
    ) -> Result<SearchResult, SolveError> {
        let start = Instant::now();
        self.mem.clear();
        if clear_tt {
            if let Some(tt) = &mut self.tt {
                tt.clear();
            }
        }
        let mut search = Search {
            target: problem.target,
            defender: problem.defender,
            sw,
            dw,
            limits,
            ctx: EvalContext::new(limits.node_budget),
            tt: self.tt.as_mut(),
            mem: &mut self.mem,
            leaves: 0,
        };
        let outcome = search.node(&problem.board, problem.to_move, 0, 0);
        let leaves = search.leaves;
        let nodes = search.ctx.nodes_used();
        match outcome {
            Ok((status, principal_move)) => Ok(SearchResult {
                status,
                terminal_leaves: leaves,
                nodes,
                principal_move,
                elapsed: start.elapsed(),
            }),
            Err(BudgetExceeded) => Err(SolveError::BudgetExceeded { nodes }),
        }
    }

    /// Solve a corpus slice in order. Budget overruns are recorded as
    /// `leaves = node_budget` rather than raised.
    pub fn solve_set(
        &mut self,
        problems: &[Problem],
        sw: &StaticWeights,
        dw: &DynamicWeights,
        limits: SearchLimits,
    ) -> Vec<SetEntry> {
        problems
            .iter()
            .map(|problem| match self.solve(problem, sw, dw, limits) {
                Ok(result) => SetEntry {
                    problem_id: problem.id.clone(),
                    leaves: result.terminal_leaves,
                    outcome: SetOutcome::Solved(result.status),
                },
                Err(SolveError::BudgetExceeded { .. }) => SetEntry {
                    problem_id: problem.id.clone(),
                    leaves: limits.node_budget,
                    outcome: SetOutcome::Overrun,
                },
            })
            .collect()
    }
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

/// Solve one problem with a fresh solver.
pub fn solve(
    problem: &Problem,
    sw: &StaticWeights,
    dw: &DynamicWeights,
    limits: SearchLimits,
) -> Result<SearchResult, SolveError> {
    Solver::new().solve(problem, sw, dw, limits)
}

/// Solve a corpus slice with a fresh solver.
pub fn solve_set(
    problems: &[Problem],
    sw: &StaticWeights,
    dw: &DynamicWeights,
    limits: SearchLimits,
) -> Vec<SetEntry> {
    Solver::new().solve_set(problems, sw, dw, limits)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SetEntry {
    pub problem_id: String,
    pub leaves: u64,
    pub outcome: SetOutcome,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SetOutcome {
    Solved(Status),
    Overrun,
}

impl SetEntry {
    pub fn status_token(&self) -> &'static str {
        match self.outcome {
            SetOutcome::Solved(status) => status.token(),
            SetOutcome::Overrun => "overrun",
        }
    }
}

struct Search<'a> {
    target: Point,
    defender: Color,
    sw: &'a StaticWeights,
    dw: &'a DynamicWeights,
    limits: SearchLimits,
    ctx: EvalContext,
    tt: Option<&'a mut TranspositionTable>,
    mem: &'a mut SearchMemory,
    leaves: u64,
}

impl Search<'_> {
    /// Returns the node's status plus the move that proves it: the winning
    /// move at winning nodes, the first-ranked move otherwise. The caller
    /// uses it as the refuting reply when its own move failed.
    fn node(
        &mut self,
        board: &Board,
        side: Color,
        pass_streak: u8,
        depth: u32,
    ) -> Result<(Status, Move), BudgetExceeded> {
        self.ctx.tick()?;
        NODES_EXPANDED.with(|n| n.set(n.get() + 1));
        if depth >= self.limits.max_depth {
            return Err(BudgetExceeded);
        }
        if let Some(status) = static_status_within(
            board,
            self.target,
            self.defender,
            pass_streak >= 2,
            &mut self.ctx,
        )? {
            self.leaves += 1;
            return Ok((status, Move::Pass));
        }

        let streak1 = pass_streak >= 1;
        let mut suggestion = None;
        if let Some(tt) = &self.tt {
            if let Some(hit) = tt.probe(board.hash()) {
                if hit.streak1 == streak1 {
                    if let Some(status) = hit.status {
                        // Transposition hit: resolved without expansion and
                        // not a leaf.
                        return Ok((status, hit.best));
                    }
                }
                suggestion = Some(hit.best);
            }
        }

        self.mem.node.tt_suggestion = suggestion;
        self.mem.node.last_opponent_win = self.mem.last_win_at(depth, side.opponent());
        self.mem.node.useless_for_opponent = if self.dw.0[1] != 0 {
            useless_points_for(board, side.opponent())
        } else {
            Vec::new()
        };

        let ranked = rank_moves(board, side, self.sw, self.dw, self.mem, self.target);
        let favored: Vec<Move> = ranked.iter().take(2).map(|&(m, _)| m).collect();
        let first_move = ranked[0].0;
        let mut queue: VecDeque<Move> = ranked.into_iter().map(|(m, _)| m).collect();

        while let Some(mv) = queue.pop_front() {
            let child = board.play(side, mv).expect("ranked moves are legal");
            let child_streak = if mv.is_pass() { pass_streak + 1 } else { 0 };
            let saved = self.mem.swap_node_context(NodeContext {
                prev_favored: favored.clone(),
                ..NodeContext::default()
            });
            let outcome = self.node(&child, side.opponent(), child_streak, depth + 1);
            self.mem.node = saved;
            let (status, reply) = outcome?;

            if status.favorable_to(side, self.defender) {
                self.mem.record_win(mv, side, depth);
                if let Some(tt) = &mut self.tt {
                    tt.store(board.hash(), streak1, Some(status), mv);
                }
                return Ok((status, mv));
            }

            // The reply refuted our move: remember it and try it next here
            // when it is one of our remaining moves.
            self.mem.note_refutation(reply);
            if let Some(pos) = queue.iter().position(|&m| m == reply) {
                if pos > 0 {
                    let promoted = queue.remove(pos).expect("position is in range");
                    queue.push_front(promoted);
                }
            }
            if depth == 0 {
                self.mem.decay_win_counts(self.dw.0[7]);
            }
        }

        let status = Status::goal_of(side, self.defender).flipped();
        if let Some(tt) = &mut self.tt {
            tt.store(board.hash(), streak1, Some(status), first_move);
        }
        Ok((status, first_move))
    }
}

/// Points that are currently illegal for `opponent` or self-atari for
/// `opponent`.
fn useless_points_for(board: &Board, opponent: Color) -> Vec<Point> {
    board
        .points()
        .filter(|&p| board.cell(p).is_none())
        .filter(|&p| match board.play(opponent, Move::Play(p)) {
            Err(_) => true,
            Ok(child) => {
                child
                    .chain_at(p)
                    .expect("played stone forms a chain")
                    .liberties
                    .len()
                    == 1
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{generate_corpus, oracle_solve, GenParams};

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_corpus(seed: u64, count: usize) -> Vec<Problem> {
        let params = GenParams {
            width: 6,
            height: 6,
            stone_density: 0.55,
            defender: Color::Black,
            node_budget: 400_000,
        level_range: None,
        };
        generate_corpus(seed, count, &params, None, 100_000, 2)
            .expect("generation succeeds")
            .problems
    }

    fn random_weights(rng: &mut ChaCha8Rng) -> (StaticWeights, DynamicWeights) {
        let sw = StaticWeights(std::array::from_fn(|_| rng.random_range(0..=1000)));
        let dw = DynamicWeights(std::array::from_fn(|_| rng.random_range(0..=10_000)));
        (sw, dw)
    }

    #[test]
    fn alive_root_is_single_leaf() {
        let board = Board::parse(
            "oooooo\noXXXXo\noX.X.o\noXXXXo\noooooo",
            Color::White,
        )
        .unwrap();
        let problem = Problem {
            id: "alive".into(),
            to_move: Color::White,
            target: Point::new(1, 1),
            defender: Color::Black,
            unique_winning_move: None,
            oracle_status: Status::DefenderLives,
            difficulty: 1,
            oracle_leaves: 1,
            board,
        };
        let result = solve(
            &problem,
            &StaticWeights::zeros(),
            &DynamicWeights::zeros(),
            SearchLimits::default(),
        )
        .unwrap();
        assert_eq!(result.status, Status::DefenderLives);
        assert_eq!(result.terminal_leaves, 1);
        assert!(problem.board.is_legal(problem.to_move, result.principal_move));
    }

    #[test]
    fn statuses_match_the_oracle_for_any_weights() {
        let problems = small_corpus(21, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut solver = Solver::new();
        for problem in &problems {
            let (oracle_status, _) = oracle_solve(problem, 10_000_000).unwrap();
            assert_eq!(oracle_status, problem.oracle_status);
            for _ in 0..5 {
                let (sw, dw) = random_weights(&mut rng);
                let result = solver
                    .solve(problem, &sw, &dw, SearchLimits::default())
                    .unwrap();
                assert_eq!(result.status, oracle_status, "problem {}", problem.id);
                assert!(result.terminal_leaves >= 1);
                assert!(result.nodes >= result.terminal_leaves);
            }
        }
    }

    #[test]
    fn solving_is_deterministic() {
        let problems = small_corpus(22, 3);
        let sw = StaticWeights([700; 12]);
        let dw = DynamicWeights([3000; 10]);
        let a = solve_set(&problems, &sw, &dw, SearchLimits::default());
        let b = solve_set(&problems, &sw, &dw, SearchLimits::default());
        assert_eq!(a, b);
    }

    #[test]
    fn transposition_table_never_changes_status() {
        let problems = small_corpus(23, 4);
        let sw = StaticWeights([300; 12]);
        let dw = DynamicWeights([8000; 10]);
        let mut with_tt = Solver::new();
        let mut without_tt = Solver::without_tt();
        for problem in &problems {
            let a = with_tt
                .solve(problem, &sw, &dw, SearchLimits::default())
                .unwrap();
            let b = without_tt
                .solve(problem, &sw, &dw, SearchLimits::default())
                .unwrap();
            assert_eq!(a.status, b.status);
        }
    }

    #[test]
    fn budget_overrun_is_an_error_from_solve() {
        let problems = small_corpus(24, 1);
        let limits = SearchLimits {
            max_depth: 48,
            node_budget: 3,
        };
        let err = solve(
            &problems[0],
            &StaticWeights::zeros(),
            &DynamicWeights::zeros(),
            limits,
        )
        .unwrap_err();
        let SolveError::BudgetExceeded { nodes } = err;
        assert!(nodes > 3);
    }

    #[test]
    fn solve_set_records_overruns_as_budget_leaves() {
        let problems = small_corpus(24, 2);
        let limits = SearchLimits {
            max_depth: 48,
            node_budget: 3,
        };
        let entries = solve_set(
            &problems,
            &StaticWeights::zeros(),
            &DynamicWeights::zeros(),
            limits,
        );
        assert_eq!(entries.len(), 2);
        for entry in entries {
            assert_eq!(entry.outcome, SetOutcome::Overrun);
            assert_eq!(entry.leaves, 3);
        }
    }

    #[test]
    fn solve_set_on_empty_slice() {
        assert!(solve_set(
            &[],
            &StaticWeights::zeros(),
            &DynamicWeights::zeros(),
            SearchLimits::default()
        )
        .is_empty());
    }
}
