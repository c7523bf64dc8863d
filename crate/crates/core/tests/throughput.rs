//! Wall-clock scaling of parallel evaluation. Kept in its own binary so no
//! sibling test competes for cores while timing.

use std::sync::Arc;
use std::time::Instant;

use tsume_core::cluster::{evaluate_children, EvalMode, EvalSpec, InProcessPool, WorkerPool};
use tsume_core::fitness::FitnessVariant;
use tsume_core::ga::{Chromosome, WeightKind};
use tsume_core::problems::{generate_corpus, GenParams};
use tsume_core::solver::SearchLimits;
use tsume_core::{Color, StaticWeights};

#[test]
fn two_workers_beat_the_scaling_bound() {
    let params = GenParams {
        width: 6,
        height: 6,
        stone_density: 0.5,
        defender: Color::Black,
        node_budget: 300_000,
        level_range: None,
    };
    // Mid-difficulty problems so one task is tens of milliseconds of solving.
    let corpus = Arc::new(
        generate_corpus(61, 6, &params, Some((5, 9)), 300_000, 2).expect("generation succeeds"),
    );
    // Identical chromosomes: uniform per-task cost.
    let kids: Vec<Chromosome> = (0..8u64)
        .map(|id| Chromosome {
            id,
            alleles: vec![4000; 10],
            fitness: None,
        })
        .collect();
    let spec = EvalSpec {
        weight_kind: WeightKind::Dynamic,
        fixed_other: StaticWeights::original().0.to_vec(),
        mode: EvalMode::Dynamic(FitnessVariant::NegativeNew),
        limits: SearchLimits::training(),
        corpus_hash: corpus.corpus_hash,
    };

    let mut timed = |threads: usize, warmup: bool| {
        let mut pool = InProcessPool::new(Arc::clone(&corpus), threads);
        if warmup {
            evaluate_children(&kids, &spec, &mut pool).unwrap();
        }
        let start = Instant::now();
        let results = evaluate_children(&kids, &spec, &mut pool).unwrap();
        (start.elapsed().as_secs_f64(), results)
    };

    let (t1, serial_results) = timed(1, true);
    let (t2, parallel_results) = timed(2, false);
    assert_eq!(serial_results, parallel_results);

    // ceil(n/w)/n + 0.25 with n = 8 tasks and w = 2 workers.
    let bound = (4.0 / 8.0 + 0.25) * t1;
    assert!(
        t2 <= bound,
        "2 workers took {t2:.3}s, bound {bound:.3}s (single worker {t1:.3}s)"
    );
}
