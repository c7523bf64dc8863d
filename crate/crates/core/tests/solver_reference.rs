//! Differential check of the zero-weight search order: an independently
//! written canonical-order searcher with the same transposition and
//! backtrack-promotion mechanisms must report identical statuses and leaf
//! counts.

use std::collections::VecDeque;

use tsume_core::problems::{generate_corpus, static_status, GenParams, Status};
use tsume_core::solver::{solve, SearchLimits};
use tsume_core::{Board, Color, DynamicWeights, Move, Problem, StaticWeights};

const REF_TT_BITS: usize = 20;

#[derive(Clone, Copy)]
struct RefSlot {
    key: u64,
    used: bool,
    streak1: bool,
    status: Status,
    best: Move,
}

struct RefSearcher {
    target: tsume_core::Point,
    defender: Color,
    tt: Vec<RefSlot>,
    leaves: u64,
}

impl RefSearcher {
    fn new(problem: &Problem) -> RefSearcher {
        RefSearcher {
            target: problem.target,
            defender: problem.defender,
            tt: vec![
                RefSlot {
                    key: 0,
                    used: false,
                    streak1: false,
                    status: Status::DefenderLives,
                    best: Move::Pass,
                };
                1 << REF_TT_BITS
            ],
            leaves: 0,
        }
    }

    fn run(&mut self, board: &Board, side: Color, streak: u8, depth: u32) -> (Status, Move) {
        assert!(depth < 48, "reference search exceeded the depth limit");
        if let Some(status) = static_status(board, self.target, self.defender, streak >= 2) {
            self.leaves += 1;
            return (status, Move::Pass);
        }
        let slot = (board.hash() & ((1 << REF_TT_BITS) - 1)) as usize;
        let hit = self.tt[slot];
        if hit.used && hit.key == board.hash() && hit.streak1 == (streak >= 1) {
            return (hit.status, hit.best);
        }

        let mut queue: VecDeque<Move> = board.legal_moves(side).into();
        let first = queue[0];
        while let Some(mv) = queue.pop_front() {
            let child = board.play(side, mv).unwrap();
            let child_streak = if mv.is_pass() { streak + 1 } else { 0 };
            let (status, reply) = self.run(&child, side.opponent(), child_streak, depth + 1);
            if status.favorable_to(side, self.defender) {
                self.tt[slot] = RefSlot {
                    key: board.hash(),
                    used: true,
                    streak1: streak >= 1,
                    status,
                    best: mv,
                };
                return (status, mv);
            }
            if let Some(pos) = queue.iter().position(|&m| m == reply) {
                if pos > 0 {
                    let promoted = queue.remove(pos).unwrap();
                    queue.push_front(promoted);
                }
            }
        }
        let status = Status::goal_of(side, self.defender).flipped();
        self.tt[slot] = RefSlot {
            key: board.hash(),
            used: true,
            streak1: streak >= 1,
            status,
            best: first,
        };
        (status, first)
    }
}

#[test]
fn zero_weight_search_matches_the_reference_searcher() {
    let params = GenParams {
        width: 6,
        height: 6,
        stone_density: 0.55,
        defender: Color::Black,
        node_budget: 400_000,
        level_range: None,
    };
    let corpus = generate_corpus(71, 8, &params, None, 200_000, 2).expect("generation succeeds");
    for problem in &corpus.problems {
        let result = solve(
            problem,
            &StaticWeights::zeros(),
            &DynamicWeights::zeros(),
            SearchLimits::testing(),
        )
        .unwrap();
        let mut reference = RefSearcher::new(problem);
        let (status, _) = reference.run(&problem.board, problem.to_move, 0, 0);
        assert_eq!(result.status, status, "status diverged on {}", problem.id);
        assert_eq!(
            result.terminal_leaves, reference.leaves,
            "leaf counts diverged on {}",
            problem.id
        );
    }
}
