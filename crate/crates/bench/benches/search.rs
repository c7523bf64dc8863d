use criterion::{criterion_group, criterion_main, Criterion};

use tsume_bench::{bench_corpus, bench_dynamic_weights};
use tsume_core::problems::oracle_solve;
use tsume_core::solver::{SearchLimits, Solver};
use tsume_core::{Color, DynamicWeights, Move, StaticWeights};

fn board_ops(c: &mut Criterion) {
    let corpus = bench_corpus();
    let board = &corpus.problems[0].board;
    c.bench_function("legal_moves", |b| {
        b.iter(|| std::hint::black_box(board.legal_moves(Color::Black)))
    });
    let mv = board.legal_moves(corpus.problems[0].to_move)[0];
    c.bench_function("play", |b| {
        b.iter(|| std::hint::black_box(board.play(corpus.problems[0].to_move, mv).unwrap()))
    });
    c.bench_function("pass_alive_check", |b| {
        b.iter(|| std::hint::black_box(board.is_unconditionally_alive(corpus.problems[0].target)))
    });
    let _ = Move::Pass;
}

fn solving(c: &mut Criterion) {
    let corpus = bench_corpus();
    let problem = corpus
        .problems
        .iter()
        .max_by_key(|p| p.oracle_leaves)
        .unwrap();
    let limits = SearchLimits::training();

    c.bench_function("oracle_solve", |b| {
        b.iter(|| oracle_solve(std::hint::black_box(problem), 10_000_000).unwrap())
    });

    let mut solver = Solver::new();
    c.bench_function("solve_zero_weights", |b| {
        b.iter(|| {
            solver
                .solve(
                    std::hint::black_box(problem),
                    &StaticWeights::zeros(),
                    &DynamicWeights::zeros(),
                    limits,
                )
                .unwrap()
        })
    });

    let dw = bench_dynamic_weights();
    c.bench_function("solve_dynamic_weights", |b| {
        b.iter(|| {
            solver
                .solve(std::hint::black_box(problem), &StaticWeights::zeros(), &dw, limits)
                .unwrap()
        })
    });
}

criterion_group!(benches, board_ops, solving);
criterion_main!(benches);
