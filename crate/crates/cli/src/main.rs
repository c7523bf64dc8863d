//! Experiment harness: corpus generation, training, testing, profiling,
//! timing statistics, and worker startup.

mod config;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::TrainConfig;
use tsume_core::cluster::{
    worker_loop, EvalMode, EvalSpec, InProcessPool, PoolEvaluator, SocketPool, WorkerError,
    WorkerPool,
};
use tsume_core::fitness::FitnessVariant;
use tsume_core::ga::{history_csv, run_ga, GaConfig, GaError, WeightKind};
use tsume_core::goban::Color;
use tsume_core::heuristics::{
    format_weight_file, parse_weight_file, DynamicWeights, StaticWeights, WeightFile,
};
use tsume_core::problems::{generate_corpus, load_corpus, save_corpus, Corpus, GenParams};
use tsume_core::solver::{SearchLimits, SetEntry, Solver};
use tsume_core::stats::{difference_of_means, profile_histogram, StatsError};

/// Exit codes: 0 success, 2 usage error, 3 data error, 4 cluster error.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Cluster(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Cluster(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) | CliError::Cluster(msg) => msg,
        }
    }
}

fn data_err(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

#[derive(Parser)]
#[command(
    name = "tsume",
    version,
    about = "Closed-boundary life & death solver, trainer and evaluation harness",
    after_long_help = "RANDOMNESS\n    Every command that takes --seed (or a config `seed`) derives all of its\n    randomness from that one value through independent per-purpose streams:\n    corpus generation uses stream (seed, corpus, attempt-index); training\n    uses stream (seed, ga) for population initialization, selection,\n    crossover and mutation. Wall-clock time never seeds anything, so every\n    seeded command is byte-reproducible."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a problem corpus and print its difficulty histogram.
    GenCorpus(GenCorpusArgs),
    /// Train heuristic weights with the genetic algorithm.
    Train(TrainArgs),
    /// Solve a corpus with a weight file and report per-problem leaves.
    Test(TestArgs),
    /// Profile one weight file against another as leaf-ratio histograms.
    Profile(ProfileArgs),
    /// Timed difference-of-means test between two weight files.
    Ttest(TtestArgs),
    /// Run a worker that serves evaluation tasks to a training master.
    Worker(WorkerArgs),
}

#[derive(Args)]
struct GenCorpusArgs {
    #[arg(long)]
    seed: u64,
    /// Number of problems to accept.
    #[arg(long)]
    count: usize,
    /// Board size including the wall ring, e.g. 7x7.
    #[arg(long)]
    size: String,
    #[arg(long)]
    out: PathBuf,
    /// Only accept difficulty levels A..B (inclusive), e.g. 6..10.
    #[arg(long)]
    level_range: Option<String>,
    /// Interior stone probability.
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// Defender color, B or W.
    #[arg(long, default_value = "B")]
    defender: String,
    /// Oracle node budget per generation candidate.
    #[arg(long, default_value_t = 5_000_000)]
    budget: u64,
    /// Give up after this many candidate attempts.
    #[arg(long)]
    max_attempts: Option<u64>,
    #[arg(long, default_value_t = default_threads())]
    threads: usize,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct TestArgs {
    #[arg(long)]
    weights: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = SearchLimits::testing().node_budget)]
    node_budget: u64,
    #[arg(long, default_value_t = SearchLimits::testing().max_depth)]
    max_depth: u32,
}

#[derive(Args)]
struct ProfileArgs {
    /// Weight file of the reference heuristic.
    #[arg(long)]
    old: PathBuf,
    /// Weight file of the heuristic under test.
    #[arg(long)]
    new: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    bin_width: f64,
    #[arg(long, default_value_t = SearchLimits::testing().node_budget)]
    node_budget: u64,
}

#[derive(Args)]
struct TtestArgs {
    /// Timed runs per weight file (at least 2).
    #[arg(long)]
    runs: u32,
    #[arg(long)]
    weights_a: PathBuf,
    #[arg(long)]
    weights_b: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = SearchLimits::testing().node_budget)]
    node_budget: u64,
}

#[derive(Args)]
struct WorkerArgs {
    /// Master address, host:port.
    #[arg(long)]
    connect: String,
    #[arg(long)]
    corpus: PathBuf,
}

fn default_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenCorpus(args) => cmd_gen_corpus(args),
        Command::Train(args) => cmd_train(args),
        Command::Test(args) => cmd_test(args),
        Command::Profile(args) => cmd_profile(args),
        Command::Ttest(args) => cmd_ttest(args),
        Command::Worker(args) => cmd_worker(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

/// Write through a temp file and rename, so failed commands leave no
/// partial outputs behind.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(data_err)?;
    fs::rename(&tmp, path).map_err(data_err)?;
    Ok(())
}

fn emit(out: Option<&PathBuf>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn parse_size(size: &str) -> Result<(u8, u8), CliError> {
    let bad = || CliError::Usage(format!("bad --size `{size}`, expected WxH like 7x7"));
    let (w, h) = size.split_once('x').ok_or_else(bad)?;
    let w: u8 = w.parse().map_err(|_| bad())?;
    let h: u8 = h.parse().map_err(|_| bad())?;
    if !(4..=9).contains(&w) || !(4..=9).contains(&h) {
        return Err(CliError::Usage(
            "board size must be between 4x4 and 9x9 including the wall".into(),
        ));
    }
    Ok((w, h))
}

fn parse_level_range(range: &str) -> Result<(u8, u8), CliError> {
    let bad = || CliError::Usage(format!("bad --level-range `{range}`, expected A..B like 6..10"));
    let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
    let lo: u8 = lo.parse().map_err(|_| bad())?;
    let hi: u8 = hi.parse().map_err(|_| bad())?;
    if lo < 1 || hi > 14 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_color(s: &str) -> Result<Color, CliError> {
    match s {
        "B" => Ok(Color::Black),
        "W" => Ok(Color::White),
        _ => Err(CliError::Usage(format!("bad color `{s}`, expected B or W"))),
    }
}

fn load_weights(path: &Path) -> Result<WeightFile, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    parse_weight_file(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_corpus_arg(path: &Path) -> Result<Corpus, CliError> {
    load_corpus(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn cmd_gen_corpus(args: GenCorpusArgs) -> Result<(), CliError> {
    let (width, height) = parse_size(&args.size)?;
    let level_range = args
        .level_range
        .as_deref()
        .map(parse_level_range)
        .transpose()?;
    if !(0.0..=1.0).contains(&args.density) {
        return Err(CliError::Usage("--density must be in [0,1]".into()));
    }
    let params = GenParams {
        width,
        height,
        stone_density: args.density,
        defender: parse_color(&args.defender)?,
        node_budget: args.budget,
        level_range,
    };
    let max_attempts = args
        .max_attempts
        .unwrap_or_else(|| 200_000 + args.count as u64 * 5_000);
    let corpus = generate_corpus(
        args.seed,
        args.count,
        &params,
        level_range,
        max_attempts,
        args.threads,
    )
    .map_err(data_err)?;

    let tmp = args.out.with_extension("tmp");
    save_corpus(&corpus, &tmp).map_err(data_err)?;
    fs::rename(&tmp, &args.out).map_err(data_err)?;

    let mut histogram: BTreeMap<u8, usize> = BTreeMap::new();
    for problem in &corpus.problems {
        *histogram.entry(problem.difficulty).or_insert(0) += 1;
    }
    for (level, count) in histogram {
        println!("level {level}: {count}");
    }
    println!("wrote {} problems to {}", corpus.len(), args.out.display());
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.config.display())))?;
    let config = TrainConfig::parse(&text).map_err(CliError::Data)?;
    let corpus = load_corpus_arg(&config.train_corpus)?;

    let ga_config = GaConfig {
        population_size: config.population,
        children_per_generation: config.children,
        crossover_rate: config.crossover_rate,
        mutation_rate: config.mutation_rate,
        generations: config.generations,
        fitness_variant: config.fitness.unwrap_or(FitnessVariant::NegativeNew),
        elite_count: config.elite_count,
        rng_seed: tsume_core::seeds::derive(config.seed, tsume_core::seeds::GA),
        weight_kind: config.weight_kind,
    };
    ga_config.validate().map_err(data_err)?;

    let fixed_other = match config.weight_kind {
        WeightKind::Static => DynamicWeights::original().0.to_vec(),
        WeightKind::Dynamic => StaticWeights::original().0.to_vec(),
    };
    let spec = EvalSpec {
        weight_kind: config.weight_kind,
        fixed_other,
        mode: match config.fitness {
            None => EvalMode::StaticRank,
            Some(variant) => EvalMode::Dynamic(variant),
        },
        limits: config.limits,
        corpus_hash: corpus.corpus_hash,
    };

    let mut socket_pool;
    let mut local_pool;
    let pool: &mut dyn WorkerPool = match &config.listen {
        Some((addr, workers)) => {
            println!("listening on {addr}, waiting for {workers} workers");
            let (pool, _) = SocketPool::bind(addr, *workers, corpus.corpus_hash)
                .map_err(|e| CliError::Cluster(e.to_string()))?;
            socket_pool = pool;
            &mut socket_pool
        }
        None => {
            local_pool = InProcessPool::new(Arc::new(corpus), config.threads);
            &mut local_pool
        }
    };

    let mut evaluator = PoolEvaluator { spec, pool };
    let (best, history) = run_ga(&ga_config, &mut evaluator).map_err(|e| match e {
        GaError::EvaluatorFailure(msg) => CliError::Cluster(msg),
        GaError::BadConfig(msg) => CliError::Data(msg),
    })?;

    for record in &history {
        println!(
            "generation {}: best {} mean {}",
            record.generation, record.best_raw, record.mean_raw
        );
    }

    fs::create_dir_all(&config.out_dir).map_err(data_err)?;
    let weights_text = match config.weight_kind {
        WeightKind::Static => format_weight_file(
            Some(&StaticWeights::from_alleles(&best.alleles).map_err(data_err)?),
            Some(&DynamicWeights::original()),
        ),
        WeightKind::Dynamic => format_weight_file(
            Some(&StaticWeights::original()),
            Some(&DynamicWeights::from_alleles(&best.alleles).map_err(data_err)?),
        ),
    };
    write_atomic(&config.out_dir.join("best_weights.txt"), &weights_text)?;
    write_atomic(&config.out_dir.join("history.csv"), &history_csv(&history))?;
    let report = best.fitness.as_ref().expect("best chromosome is evaluated");
    write_atomic(&config.out_dir.join("best_report.csv"), &report.to_csv())?;
    println!(
        "best chromosome {} raw fitness {} -> {}",
        best.id,
        report.raw,
        config.out_dir.join("best_weights.txt").display()
    );
    Ok(())
}

fn set_csv(entries: &[SetEntry]) -> String {
    let mut out = String::from("problem_id,leaves,status\n");
    let mut total = 0u64;
    for entry in entries {
        total += entry.leaves;
        let _ = writeln!(
            out,
            "{},{},{}",
            entry.problem_id,
            entry.leaves,
            entry.status_token()
        );
    }
    let _ = writeln!(out, "total,{total},-");
    out
}

fn cmd_test(args: TestArgs) -> Result<(), CliError> {
    let weights = load_weights(&args.weights)?;
    let corpus = load_corpus_arg(&args.corpus)?;
    let limits = SearchLimits {
        node_budget: args.node_budget,
        max_depth: args.max_depth,
    };
    let entries = Solver::new().solve_set(
        &corpus.problems,
        &weights.static_or_zeros(),
        &weights.dynamic_or_zeros(),
        limits,
    );
    emit(args.out.as_ref(), &set_csv(&entries))
}

fn cmd_profile(args: ProfileArgs) -> Result<(), CliError> {
    let old_weights = load_weights(&args.old)?;
    let new_weights = load_weights(&args.new)?;
    let corpus = load_corpus_arg(&args.corpus)?;
    if corpus.is_empty() {
        return Err(CliError::Data("corpus is empty".into()));
    }
    let limits = SearchLimits {
        node_budget: args.node_budget,
        ..SearchLimits::testing()
    };
    let mut solver = Solver::new();
    let old_entries = solver.solve_set(
        &corpus.problems,
        &old_weights.static_or_zeros(),
        &old_weights.dynamic_or_zeros(),
        limits,
    );
    let new_entries = solver.solve_set(
        &corpus.problems,
        &new_weights.static_or_zeros(),
        &new_weights.dynamic_or_zeros(),
        limits,
    );

    let mut slices: BTreeMap<String, Vec<(u64, u64)>> = BTreeMap::new();
    for ((problem, old), new) in corpus.problems.iter().zip(&old_entries).zip(&new_entries) {
        let pair = (old.leaves, new.leaves);
        slices.entry("all".into()).or_default().push(pair);
        slices
            .entry(format!("level{:02}", problem.difficulty))
            .or_default()
            .push(pair);
    }

    let mut out = String::from("slice,bin_low_pct,count,normalized\n");
    for (slice, pairs) in slices {
        let hist = profile_histogram(&pairs, args.bin_width).map_err(data_err)?;
        for (i, (&count, &normalized)) in hist.bins.iter().zip(&hist.normalized).enumerate() {
            if count > 0 {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    slice,
                    i as f64 * hist.bin_width_pct,
                    count,
                    normalized
                );
            }
        }
    }
    emit(args.out.as_ref(), &out)
}

fn cmd_ttest(args: TtestArgs) -> Result<(), CliError> {
    if args.runs < 2 {
        return Err(CliError::Usage("--runs must be at least 2".into()));
    }
    let weights_a = load_weights(&args.weights_a)?;
    let weights_b = load_weights(&args.weights_b)?;
    let corpus = load_corpus_arg(&args.corpus)?;
    if corpus.is_empty() {
        return Err(CliError::Data("corpus is empty".into()));
    }
    let limits = SearchLimits {
        node_budget: args.node_budget,
        ..SearchLimits::testing()
    };
    let mut solver = Solver::new();
    let mut run = |weights: &WeightFile| -> (u64, f64) {
        let start = Instant::now();
        let entries = solver.solve_set(
            &corpus.problems,
            &weights.static_or_zeros(),
            &weights.dynamic_or_zeros(),
            limits,
        );
        let elapsed = start.elapsed().as_secs_f64();
        (entries.iter().map(|e| e.leaves).sum(), elapsed)
    };

    // Warm caches once, then interleave the timed runs to spread drift
    // evenly over both groups.
    run(&weights_a);
    let mut times_a = Vec::with_capacity(args.runs as usize);
    let mut times_b = Vec::with_capacity(args.runs as usize);
    let mut leaves_a = 0;
    let mut leaves_b = 0;
    for i in 0..args.runs {
        let (leaves, time) = run(&weights_a);
        if i == 0 {
            leaves_a = leaves;
        }
        times_a.push(time);
        let (leaves, time) = run(&weights_b);
        if i == 0 {
            leaves_b = leaves;
        }
        times_b.push(time);
    }
    let result =
        difference_of_means(&times_a, &times_b, leaves_a, leaves_b, args.alpha).map_err(|e| {
            match e {
                StatsError::BadArgument(msg) => CliError::Usage(msg),
                other => CliError::Data(other.to_string()),
            }
        })?;
    emit(args.out.as_ref(), &result.to_csv())
}

fn cmd_worker(args: WorkerArgs) -> Result<(), CliError> {
    worker_loop(&args.connect, &args.corpus).map_err(|e| match e {
        WorkerError::Corpus(e) => CliError::Data(e.to_string()),
        other => CliError::Cluster(other.to_string()),
    })
}
