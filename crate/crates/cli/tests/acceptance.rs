//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers. Corpora and the trained weight vector are built
//! once and shared.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::path::PathBuf;
use std::process::Command;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tsume_core::cluster::{
    evaluate_children, read_frame, worker_loop, write_frame, EvalMode, EvalSpec, InProcessPool,
    PendingPool, PoolEvaluator, WireMessage, WorkerPool, PROTOCOL_VERSION,
};
use tsume_core::fitness::{normalize, rank_bonus, FitnessVariant};
use tsume_core::ga::{run_ga, Chromosome, GaConfig, GenerationRecord, WeightKind};
use tsume_core::problems::{generate_corpus, oracle_solve, save_corpus, GenParams};
use tsume_core::solver::{solve_set, SearchLimits, Solver};
use tsume_core::stats::{difference_of_means, profile_histogram, student_t_quantile};
use tsume_core::{Color, Corpus, DynamicWeights, Problem, StaticWeights};

fn gen_params(density: f64, levels: (u8, u8)) -> GenParams {
    GenParams {
        width: 6,
        height: 6,
        stone_density: density,
        defender: Color::Black,
        node_budget: 400_000,
        level_range: Some(levels),
    }
}

/// 200 problems, levels up to 10. Shared by criteria 1, 2 and 9.
fn corpus_200() -> &'static Corpus {
    static CORPUS: OnceLock<Corpus> = OnceLock::new();
    CORPUS.get_or_init(|| {
        generate_corpus(11_000, 200, &gen_params(0.55, (1, 10)), None, 400_000, 2)
            .expect("corpus generates")
    })
}

/// 64 mid-difficulty training problems.
fn train_64() -> &'static Corpus {
    static CORPUS: OnceLock<Corpus> = OnceLock::new();
    CORPUS.get_or_init(|| {
        generate_corpus(12_000, 64, &gen_params(0.5, (5, 10)), None, 400_000, 2)
            .expect("corpus generates")
    })
}

/// 64 disjoint test problems of comparable difficulty.
fn test_64() -> &'static Corpus {
    static CORPUS: OnceLock<Corpus> = OnceLock::new();
    CORPUS.get_or_init(|| {
        generate_corpus(13_000, 64, &gen_params(0.5, (5, 10)), None, 400_000, 2)
            .expect("corpus generates")
    })
}

/// 64 easy problems for the profile criterion.
fn easy_64() -> &'static Corpus {
    static CORPUS: OnceLock<Corpus> = OnceLock::new();
    CORPUS.get_or_init(|| {
        generate_corpus(14_000, 64, &gen_params(0.55, (1, 6)), None, 400_000, 2)
            .expect("corpus generates")
    })
}

fn dynamic_eval_spec(corpus: &Corpus, limits: SearchLimits) -> EvalSpec {
    EvalSpec {
        weight_kind: WeightKind::Dynamic,
        fixed_other: StaticWeights::original().0.to_vec(),
        mode: EvalMode::Dynamic(FitnessVariant::NegativeNew),
        limits,
        corpus_hash: corpus.corpus_hash,
    }
}

struct TrainedDynamic {
    weights: DynamicWeights,
    history: Vec<GenerationRecord>,
}

/// The paper-parameter dynamic training run: population 22, children 22,
/// crossover 6.5%, mutation 50%, variant 3, 40 generations.
fn trained_dynamic() -> &'static TrainedDynamic {
    static TRAINED: OnceLock<TrainedDynamic> = OnceLock::new();
    TRAINED.get_or_init(|| {
        let train = train_64();
        let config = GaConfig {
            population_size: 22,
            children_per_generation: 22,
            crossover_rate: 0.065,
            mutation_rate: 0.5,
            generations: 40,
            fitness_variant: FitnessVariant::NegativeNew,
            elite_count: 2,
            rng_seed: 4242,
            weight_kind: WeightKind::Dynamic,
        };
        let mut pool = InProcessPool::new(Arc::new(train.clone()), 2);
        let spec = dynamic_eval_spec(train, SearchLimits::training());
        let mut evaluator = PoolEvaluator {
            spec,
            pool: &mut pool,
        };
        let (best, history) = run_ga(&config, &mut evaluator).expect("training succeeds");
        TrainedDynamic {
            weights: DynamicWeights::from_alleles(&best.alleles).expect("alleles in range"),
            history,
        }
    })
}

fn total_leaves(problems: &[Problem], sw: &StaticWeights, dw: &DynamicWeights) -> u64 {
    let entries = solve_set(problems, sw, dw, SearchLimits::testing());
    assert!(
        entries
            .iter()
            .all(|e| matches!(e.outcome, tsume_core::solver::SetOutcome::Solved(_))),
        "test-set solves must complete within the budget"
    );
    entries.iter().map(|e| e.leaves).sum()
}

struct SweepOutcome {
    problems: usize,
    vectors: usize,
    mismatches: usize,
    elapsed_secs: f64,
}

/// Criterion 1/2 workhorse: oracle re-solve plus 20 randomized weight
/// vectors over the 200-problem corpus.
fn weight_sweep() -> &'static SweepOutcome {
    static SWEEP: OnceLock<SweepOutcome> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let corpus = corpus_200();
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let vectors: Vec<(StaticWeights, DynamicWeights)> = (0..20)
            .map(|_| {
                (
                    StaticWeights(std::array::from_fn(|_| rng.random_range(0..=1000))),
                    DynamicWeights(std::array::from_fn(|_| rng.random_range(0..=10_000))),
                )
            })
            .collect();
        let mut mismatches = 0;
        let mut solver = Solver::new();
        for problem in &corpus.problems {
            let (oracle_status, _) = oracle_solve(problem, 50_000_000).expect("oracle completes");
            if oracle_status != problem.oracle_status {
                mismatches += 1;
                continue;
            }
            for (sw, dw) in &vectors {
                let result = solver
                    .solve(problem, sw, dw, SearchLimits::testing())
                    .expect("solve completes within the testing budget");
                if result.status != oracle_status {
                    mismatches += 1;
                }
            }
        }
        SweepOutcome {
            problems: corpus.len(),
            vectors: vectors.len(),
            mismatches,
            elapsed_secs: start.elapsed().as_secs_f64(),
        }
    })
}

#[test]
fn criterion_01_oracle_equivalence() {
    let sweep = weight_sweep();
    assert!(sweep.problems >= 200);
    assert_eq!(
        sweep.mismatches, 0,
        "solver status diverged from the oracle"
    );
    println!(
        "ACCEPTANCE 1 oracle-equivalence: PASS ({} problems x {} weight vectors, 0 mismatches, {:.0}s)",
        sweep.problems, sweep.vectors, sweep.elapsed_secs
    );
}

#[test]
fn criterion_02_weight_independent_accuracy() {
    let sweep = weight_sweep();
    assert_eq!(sweep.mismatches, 0, "accuracy depended on the weights");
    println!(
        "ACCEPTANCE 2 weight-independent-accuracy: PASS (0 failures over the randomized sweep)"
    );
}

#[test]
fn criterion_03_dynamic_ga_learns() {
    let trained = trained_dynamic();
    assert_eq!(trained.history.len(), 40);
    for pair in trained.history.windows(2) {
        assert!(
            pair[1].best_raw >= pair[0].best_raw,
            "best fitness decreased between generations"
        );
    }
    let test = test_64();
    let baseline = total_leaves(
        &test.problems,
        &StaticWeights::zeros(),
        &DynamicWeights::zeros(),
    );
    let tuned = total_leaves(&test.problems, &StaticWeights::zeros(), &trained.weights);
    let ratio = tuned as f64 / baseline as f64;
    assert!(
        ratio <= 0.90,
        "trained dynamic weights reached only {:.1}% of baseline (need <= 90%)",
        ratio * 100.0
    );
    println!(
        "ACCEPTANCE 3 dynamic-ga-learns: PASS (best fitness monotone over 40 generations; test-set leaves {tuned} vs baseline {baseline} = {:.1}%)",
        ratio * 100.0
    );
}

#[test]
fn criterion_04_static_fitness_is_weaker() {
    let train = train_64();
    let test = test_64();
    let base_config = GaConfig {
        population_size: 22,
        children_per_generation: 22,
        crossover_rate: 0.065,
        mutation_rate: 0.5,
        generations: 15,
        fitness_variant: FitnessVariant::NegativeNew,
        elite_count: 2,
        rng_seed: 777,
        weight_kind: WeightKind::Static,
    };

    let mut train_static = |mode: EvalMode| -> StaticWeights {
        let mut pool = InProcessPool::new(Arc::new(train.clone()), 2);
        let spec = EvalSpec {
            weight_kind: WeightKind::Static,
            fixed_other: DynamicWeights::original().0.to_vec(),
            mode,
            limits: SearchLimits::training(),
            corpus_hash: train.corpus_hash,
        };
        let mut evaluator = PoolEvaluator {
            spec,
            pool: &mut pool,
        };
        let (best, _) = run_ga(&base_config, &mut evaluator).expect("training succeeds");
        StaticWeights::from_alleles(&best.alleles).expect("alleles in range")
    };

    let by_rank = train_static(EvalMode::StaticRank);
    let by_solving = train_static(EvalMode::Dynamic(FitnessVariant::NegativeNew));

    let rank_total = total_leaves(&test.problems, &by_rank, &DynamicWeights::original());
    let solving_total = total_leaves(&test.problems, &by_solving, &DynamicWeights::original());
    assert!(
        solving_total < rank_total,
        "static weights trained by solving ({solving_total}) must beat rank-trained ({rank_total})"
    );
    println!(
        "ACCEPTANCE 4 static-vs-dynamic-fitness: PASS (test-set leaves: solving-trained {solving_total} < rank-trained {rank_total})"
    );
}

#[test]
fn criterion_05_fitness_formulas() {
    assert_eq!(FitnessVariant::OldSquaredOverNew.term(100, 50), 200.0);
    assert_eq!(FitnessVariant::OldOverNew.term(100, 50), 2.0);
    assert_eq!(FitnessVariant::NegativeNew.term(100, 50), -50.0);
    assert_eq!(FitnessVariant::ReciprocalNew.term(100, 50), 0.02);
    assert_eq!(normalize(&[-50.0, -100.0, -150.0]), vec![1.0, 0.5, 0.0]);
    println!("ACCEPTANCE 5 fitness-formulas: PASS (substitution table and normalization exact)");
}

#[test]
fn criterion_06_static_rank_bonus() {
    assert_eq!(rank_bonus(1) + rank_bonus(2) + rank_bonus(5), 34.0);
    assert_eq!(
        [20.0, 13.0, 7.0, 3.0, 1.0].map(|_: f64| 0.0).len(),
        5,
        "tuple has five entries"
    );
    for (rank, expected) in [(1, 20.0), (2, 13.0), (3, 7.0), (4, 3.0), (5, 1.0), (6, 0.0)] {
        assert_eq!(rank_bonus(rank), expected);
    }
    println!("ACCEPTANCE 6 static-rank-bonus: PASS (ranks 1,2,5 -> 34; rank > 5 -> 0)");
}

#[test]
fn criterion_07_parallelism_transparency() {
    let corpus = train_64();
    let slice = Corpus::new(corpus.problems[..8].to_vec(), corpus.generator_seed);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("par.corpus");
    save_corpus(&slice, &path).unwrap();
    let children: Vec<Chromosome> = (0..22u64)
        .map(|id| Chromosome {
            id,
            alleles: (0..10).map(|i| (id as i64 * 977 + i * 131) % 10_001).collect(),
            fitness: None,
        })
        .collect();
    let spec = dynamic_eval_spec(&slice, SearchLimits::training());

    // In-process pools at several widths.
    let mut reference = None;
    for threads in [1usize, 3, 22] {
        let mut pool = InProcessPool::new(Arc::new(slice.clone()), threads);
        let results = evaluate_children(&children, &spec, &mut pool).unwrap();
        let bytes = serde_json::to_vec(&results).unwrap();
        match &reference {
            None => reference = Some(bytes),
            Some(expected) => assert_eq!(&bytes, expected, "{threads} threads diverged"),
        }
    }
    let reference = reference.unwrap();

    // Socket pools at several worker counts.
    for workers in [1usize, 3, 22] {
        let pending = PendingPool::bind("127.0.0.1:0").unwrap();
        let addr = pending.local_addr().unwrap().to_string();
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                let addr = addr.clone();
                let path = path.clone();
                std::thread::spawn(move || worker_loop(&addr, &path))
            })
            .collect();
        let mut pool = pending.accept_workers(workers, slice.corpus_hash).unwrap();
        let results = evaluate_children(&children, &spec, &mut pool).unwrap();
        assert_eq!(
            serde_json::to_vec(&results).unwrap(),
            reference,
            "{workers} socket workers diverged"
        );
        pool.shutdown();
        for handle in handles {
            handle.join().unwrap().unwrap();
        }
    }

    // One injected crash must not change the output.
    let pending = PendingPool::bind("127.0.0.1:0").unwrap();
    let addr = pending.local_addr().unwrap().to_string();
    let hash_hex = format!("{:016x}", slice.corpus_hash);
    let crasher = std::thread::spawn({
        let addr = addr.clone();
        move || {
            let mut stream = std::net::TcpStream::connect(&addr).unwrap();
            write_frame(
                &mut stream,
                &WireMessage::Hello {
                    protocol: PROTOCOL_VERSION,
                    corpus_hash: hash_hex,
                    worker_id: "crasher".into(),
                },
            )
            .unwrap();
            let _ack = read_frame(&mut stream).unwrap();
            let _task = read_frame(&mut stream).unwrap();
            // Die with the task unanswered.
        }
    });
    let good = {
        let path = path.clone();
        std::thread::spawn(move || worker_loop(&addr, &path))
    };
    let mut pool = pending.accept_workers(2, slice.corpus_hash).unwrap();
    let results = evaluate_children(&children, &spec, &mut pool).unwrap();
    assert_eq!(serde_json::to_vec(&results).unwrap(), reference);
    crasher.join().unwrap();
    pool.shutdown();
    good.join().unwrap().unwrap();

    // Seed-fixed GA histories are identical across pool shapes.
    let config = GaConfig {
        population_size: 6,
        children_per_generation: 6,
        crossover_rate: 0.065,
        mutation_rate: 0.5,
        generations: 3,
        fitness_variant: FitnessVariant::NegativeNew,
        elite_count: 2,
        rng_seed: 99,
        weight_kind: WeightKind::Dynamic,
    };
    let mut histories = Vec::new();
    for threads in [1usize, 3] {
        let mut pool = InProcessPool::new(Arc::new(slice.clone()), threads);
        let mut evaluator = PoolEvaluator {
            spec: dynamic_eval_spec(&slice, SearchLimits::training()),
            pool: &mut pool,
        };
        let (_, history) = run_ga(&config, &mut evaluator).unwrap();
        histories.push(history);
    }
    assert_eq!(histories[0], histories[1], "GA history depends on the pool");

    println!(
        "ACCEPTANCE 7 parallelism-transparency: PASS (1/3/22 workers byte-identical on both pools; crash recovery identical; GA histories identical)"
    );
}

/// Independently coded pooled-t oracle; quantiles come from statrs.
fn pooled_t_oracle(
    times_o: &[f64],
    times_n: &[f64],
    leaves_o: u64,
    leaves_n: u64,
    alpha: f64,
) -> (f64, f64, f64, f64) {
    use statrs::distribution::{ContinuousCDF, StudentsT};
    let tau = |ts: &[f64], l: u64| -> Vec<f64> { ts.iter().map(|t| t / l as f64).collect() };
    let to = tau(times_o, leaves_o);
    let tn = tau(times_n, leaves_n);
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let mo = mean(&to);
    let mn = mean(&tn);
    let ss = |xs: &[f64], m: f64| xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
    let df = (to.len() + tn.len() - 2) as f64;
    let sp = ((ss(&to, mo) + ss(&tn, mn)) / df).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).unwrap();
    let tq = dist.inverse_cdf(1.0 - alpha / 2.0);
    let margin = tq * sp * (1.0 / to.len() as f64 + 1.0 / tn.len() as f64).sqrt();
    (mo - mn - margin, mo - mn + margin, sp, tq)
}

#[test]
fn criterion_08_statistics_match_oracle() {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for case in 0..20 {
        let n_o = rng.random_range(3..=12);
        let n_n = rng.random_range(3..=12);
        let times_o: Vec<f64> = (0..n_o).map(|_| rng.random_range(0.5..5.0)).collect();
        let times_n: Vec<f64> = (0..n_n).map(|_| rng.random_range(0.5..5.0)).collect();
        let leaves_o = rng.random_range(50..5000);
        let leaves_n = rng.random_range(50..5000);
        let alpha = [0.2, 0.1, 0.05, 0.01][case % 4];
        let ours = difference_of_means(&times_o, &times_n, leaves_o, leaves_n, alpha).unwrap();
        let (low, high, sp, tq) = pooled_t_oracle(&times_o, &times_n, leaves_o, leaves_n, alpha);
        assert!(close(ours.ci_low, low), "case {case}: {} vs {low}", ours.ci_low);
        assert!(close(ours.ci_high, high), "case {case}: {} vs {high}", ours.ci_high);
        assert!(close(ours.pooled_sp, sp));
        assert!(close(ours.t_quantile, tq));
    }

    let quantile = student_t_quantile(0.975, 18);
    assert!(
        (quantile - 2.100_922_040_241_038_5).abs() < 1e-9,
        "t(0.975, 18) = {quantile}"
    );

    let times = [1.0, 2.0, 3.5, 4.0];
    let result = difference_of_means(&times, &times, 7, 7, 0.05).unwrap();
    assert!(result.contains_zero);

    println!(
        "ACCEPTANCE 8 statistics: PASS (20 randomized fixtures within 1e-9 relative; t(0.975,18) within 1e-9; identical samples contain 0)"
    );
}

#[test]
fn criterion_09_leaf_time_proxy() {
    let corpus = corpus_200();
    assert!(corpus.len() >= 100);
    let trained = trained_dynamic();
    let zeros = (StaticWeights::zeros(), DynamicWeights::zeros());
    let tuned = (StaticWeights::zeros(), trained.weights);
    let limits = SearchLimits::testing();

    let mut solver = Solver::new();
    let mut run = |w: &(StaticWeights, DynamicWeights)| -> (u64, f64) {
        let start = Instant::now();
        let entries = solver.solve_set(&corpus.problems, &w.0, &w.1, limits);
        let elapsed = start.elapsed().as_secs_f64();
        (entries.iter().map(|e| e.leaves).sum(), elapsed)
    };
    run(&zeros); // warm-up
    let mut times_o = Vec::new();
    let mut times_n = Vec::new();
    let mut leaves_o = 0;
    let mut leaves_n = 0;
    for i in 0..10 {
        let (l, t) = run(&zeros);
        if i == 0 {
            leaves_o = l;
        }
        times_o.push(t);
        let (l, t) = run(&tuned);
        if i == 0 {
            leaves_n = l;
        }
        times_n.push(t);
    }
    let result = difference_of_means(&times_o, &times_n, leaves_o, leaves_n, 0.05).unwrap();
    assert!(
        result.contains_zero,
        "per-leaf time CI excludes 0: ({}, {})",
        result.ci_low, result.ci_high
    );
    println!(
        "ACCEPTANCE 9 leaf-time-proxy: PASS (per-leaf time CI ({:.3e}, {:.3e}) contains 0 over {} problems x 10 runs)",
        result.ci_low, result.ci_high, corpus.len()
    );
}

#[test]
fn criterion_10_profile_signature() {
    let easy = easy_64();
    let baseline = solve_set(
        &easy.problems,
        &StaticWeights::zeros(),
        &DynamicWeights::zeros(),
        SearchLimits::testing(),
    );

    // Identical vectors against themselves: one spike at 100%.
    let self_pairs: Vec<(u64, u64)> = baseline.iter().map(|e| (e.leaves, e.leaves)).collect();
    let hist = profile_histogram(&self_pairs, 2.0).unwrap();
    let nonzero: Vec<usize> = (0..hist.bins.len()).filter(|&i| hist.bins[i] > 0).collect();
    assert_eq!(nonzero, vec![50], "expected a single spike at the 100% bin");
    assert_eq!(hist.normalized[50], 1.0);

    // Trained vs baseline on the easy corpus: mass concentrated at or below
    // 110%.
    let trained = trained_dynamic();
    let tuned = solve_set(
        &easy.problems,
        &StaticWeights::zeros(),
        &trained.weights,
        SearchLimits::testing(),
    );
    let pairs: Vec<(u64, u64)> = baseline
        .iter()
        .zip(&tuned)
        .map(|(old, new)| (old.leaves, new.leaves))
        .collect();
    let within = pairs
        .iter()
        .filter(|&&(old, new)| 100.0 * new as f64 / old as f64 <= 110.0)
        .count();
    let share = within as f64 / pairs.len() as f64;
    assert!(
        share >= 0.8,
        "only {:.0}% of problems at <= 110% (need >= 80%)",
        share * 100.0
    );
    println!(
        "ACCEPTANCE 10 profile-signature: PASS (self-profile spikes at 100%; {:.0}% of easy problems <= 110%)",
        share * 100.0
    );
}

fn tsume_bin() -> &'static str {
    env!("CARGO_BIN_EXE_tsume")
}

fn run_ok(args: &[&str], dir: &std::path::Path) -> String {
    let output = Command::new(tsume_bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout).expect("utf-8 output")
}

#[test]
fn criterion_11_cli_determinism() {
    // Serialize CLI runs: they spawn their own threads.
    static CLI_LOCK: Mutex<()> = Mutex::new(());
    let _guard = CLI_LOCK.lock().unwrap();

    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let read = |name: &str| -> Vec<u8> { std::fs::read(root.join(name)).unwrap() };

    let gen_args = [
        "gen-corpus",
        "--seed",
        "5",
        "--count",
        "6",
        "--size",
        "6x6",
        "--density",
        "0.55",
        "--budget",
        "400000",
        "--threads",
        "2",
        "--out",
    ];
    let mut first = gen_args.to_vec();
    first.push("a.corpus");
    let stdout_a = run_ok(&first, root);
    let mut second = gen_args.to_vec();
    second.push("b.corpus");
    let stdout_b = run_ok(&second, root);
    assert_eq!(read("a.corpus"), read("b.corpus"), "gen-corpus not reproducible");
    assert_eq!(
        stdout_a.replace("a.corpus", "X"),
        stdout_b.replace("b.corpus", "X")
    );

    let config = |out: &str| {
        format!(
            "weight_kind = dynamic\ntrain_corpus = a.corpus\nout_dir = {out}\nseed = 31\n\
             generations = 2\npopulation = 6\nchildren = 6\nthreads = 2\nnode_budget = 400000\n"
        )
    };
    std::fs::write(root.join("train_a.conf"), config("out_a")).unwrap();
    std::fs::write(root.join("train_b.conf"), config("out_b")).unwrap();
    run_ok(&["train", "--config", "train_a.conf"], root);
    run_ok(&["train", "--config", "train_b.conf"], root);
    for file in ["best_weights.txt", "history.csv", "best_report.csv"] {
        assert_eq!(
            read(&format!("out_a/{file}")),
            read(&format!("out_b/{file}")),
            "train output {file} not reproducible"
        );
    }

    for (cmd, out_a, out_b) in [
        ("test", "test_a.csv", "test_b.csv"),
        ("profile", "prof_a.csv", "prof_b.csv"),
    ] {
        let weights = "out_a/best_weights.txt";
        let args_for = |out: &str| -> Vec<String> {
            match cmd {
                "test" => vec![
                    "test".into(),
                    "--weights".into(),
                    weights.into(),
                    "--corpus".into(),
                    "a.corpus".into(),
                    "--out".into(),
                    out.into(),
                ],
                _ => vec![
                    "profile".into(),
                    "--old".into(),
                    weights.into(),
                    "--new".into(),
                    weights.into(),
                    "--corpus".into(),
                    "a.corpus".into(),
                    "--out".into(),
                    out.into(),
                ],
            }
        };
        fn to_refs(v: &[String]) -> Vec<&str> {
            v.iter().map(String::as_str).collect()
        }
        let a = args_for(out_a);
        run_ok(&to_refs(&a), root);
        let b = args_for(out_b);
        run_ok(&to_refs(&b), root);
        assert_eq!(read(out_a), read(out_b), "{cmd} output not reproducible");
    }

    println!(
        "ACCEPTANCE 11 cli-determinism: PASS (gen-corpus, train, test, profile byte-identical across reruns)"
    );
}
