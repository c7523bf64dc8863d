//! Shared fixtures for the benchmark targets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tsume_core::problems::{generate_corpus, GenParams};
use tsume_core::{Color, Corpus, DynamicWeights};

/// A small mid-difficulty corpus, generated once per process.
pub fn bench_corpus() -> Corpus {
    let params = GenParams {
        width: 6,
        height: 6,
        stone_density: 0.55,
        defender: Color::Black,
        node_budget: 400_000,
        level_range: None,
    };
    generate_corpus(424_242, 6, &params, Some((4, 9)), 200_000, 2)
        .expect("bench corpus generates")
}

/// A fixed mid-range dynamic weight vector.
pub fn bench_dynamic_weights() -> DynamicWeights {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    DynamicWeights(std::array::from_fn(|_| rng.random_range(0..=10_000)))
}
