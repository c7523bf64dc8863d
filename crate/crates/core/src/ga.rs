//! The genetic algorithm: roulette selection over normalized fitness,
//! single-point crossover, single-allele mutation, and merge-and-truncate
//! steady-state replacement with elitism.
//!
//! The loop is single-threaded and owns all population state; only child
//! evaluation is delegated. Results come back in child order, so the run is
//! a pure function of the seed and the evaluator.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fitness::{normalize, FitnessReport, FitnessVariant};
use crate::heuristics::{
    DYNAMIC_WEIGHT_COUNT, DYNAMIC_WEIGHT_MAX, STATIC_WEIGHT_COUNT, STATIC_WEIGHT_MAX,
};

/// Additive floor in roulette selection so zero-fitness chromosomes stay
/// selectable.
pub const SELECTION_EPSILON: f64 = 0.01;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Static,
    Dynamic,
}

impl WeightKind {
    pub fn allele_count(self) -> usize {
        match self {
            WeightKind::Static => STATIC_WEIGHT_COUNT,
            WeightKind::Dynamic => DYNAMIC_WEIGHT_COUNT,
        }
    }

    pub fn max_value(self) -> i64 {
        match self {
            WeightKind::Static => STATIC_WEIGHT_MAX,
            WeightKind::Dynamic => DYNAMIC_WEIGHT_MAX,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            WeightKind::Static => "static",
            WeightKind::Dynamic => "dynamic",
        }
    }

    pub fn from_token(s: &str) -> Option<WeightKind> {
        match s {
            "static" => Some(WeightKind::Static),
            "dynamic" => Some(WeightKind::Dynamic),
            _ => None,
        }
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.token())
    }
}

/// A candidate weight vector.
#[derive(Clone, PartialEq, Debug)]
pub struct Chromosome {
    pub id: u64,
    pub alleles: Vec<i64>,
    pub fitness: Option<FitnessReport>,
}

impl Chromosome {
    pub fn raw_fitness(&self) -> f64 {
        self.fitness
            .as_ref()
            .map(|f| f.raw)
            .expect("chromosome has been evaluated")
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct GaConfig {
    pub population_size: usize,
    pub children_per_generation: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub generations: u32,
    pub fitness_variant: FitnessVariant,
    pub elite_count: usize,
    pub rng_seed: u64,
    pub weight_kind: WeightKind,
}

impl GaConfig {
    /// Configuration used for the static weight set: population 100 with 80
    /// children, crossover 6.5%, mutation 50%.
    pub fn static_defaults(rng_seed: u64) -> GaConfig {
        GaConfig {
            population_size: 100,
            children_per_generation: 80,
            crossover_rate: 0.065,
            mutation_rate: 0.5,
            generations: 30,
            fitness_variant: FitnessVariant::NegativeNew,
            elite_count: 2,
            rng_seed,
            weight_kind: WeightKind::Static,
        }
    }

    /// Configuration used for the dynamic weight set: population and
    /// children both 22, 40 generations.
    pub fn dynamic_defaults(rng_seed: u64) -> GaConfig {
        GaConfig {
            population_size: 22,
            children_per_generation: 22,
            crossover_rate: 0.065,
            mutation_rate: 0.5,
            generations: 40,
            fitness_variant: FitnessVariant::NegativeNew,
            elite_count: 2,
            rng_seed,
            weight_kind: WeightKind::Dynamic,
        }
    }

    pub fn validate(&self) -> Result<(), GaError> {
        if self.population_size == 0 {
            return Err(GaError::BadConfig("population size must be positive".into()));
        }
        if self.children_per_generation == 0 || self.children_per_generation % 2 != 0 {
            return Err(GaError::BadConfig(
                "children per generation must be positive and even".into(),
            ));
        }
        if self.elite_count >= self.population_size {
            return Err(GaError::BadConfig(
                "elite count must be below the population size".into(),
            ));
        }
        for (name, rate) in [
            ("crossover", self.crossover_rate),
            ("mutation", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(GaError::BadConfig(format!("{name} rate must be in [0,1]")));
            }
        }
        Ok(())
    }
}

/// One line of the learning curve.
#[derive(Clone, PartialEq, Debug)]
pub struct GenerationRecord {
    pub generation: u32,
    pub best_raw: f64,
    pub mean_raw: f64,
    pub best_id: u64,
    /// Child evaluations performed this generation.
    pub evaluations: u64,
}

/// CSV for a GA history: `generation,best_raw,mean_raw,best_id`.
pub fn history_csv(history: &[GenerationRecord]) -> String {
    let mut out = String::from("generation,best_raw,mean_raw,best_id\n");
    for record in history {
        out.push_str(&format!(
            "{},{},{},{}\n",
            record.generation, record.best_raw, record.mean_raw, record.best_id
        ));
    }
    out
}

#[derive(Debug)]
pub enum GaError {
    BadConfig(String),
    /// The evaluator failed (propagated from the cluster after retries).
    EvaluatorFailure(String),
}

impl fmt::Display for GaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaError::BadConfig(msg) => write!(f, "bad GA configuration: {msg}"),
            GaError::EvaluatorFailure(msg) => write!(f, "child evaluation failed: {msg}"),
        }
    }
}

impl std::error::Error for GaError {}

/// Evaluates a batch of chromosomes, returning reports in input order.
pub trait ChildEvaluator {
    fn evaluate(&mut self, children: &[Chromosome]) -> Result<Vec<FitnessReport>, GaError>;
}

impl<F> ChildEvaluator for F
where
    F: FnMut(&[Chromosome]) -> Result<Vec<FitnessReport>, GaError>,
{
    fn evaluate(&mut self, children: &[Chromosome]) -> Result<Vec<FitnessReport>, GaError> {
        self(children)
    }
}

/// Fresh population with alleles uniform over the weight kind's range.
pub fn init_population(config: &GaConfig, rng: &mut ChaCha8Rng) -> Vec<Chromosome> {
    let len = config.weight_kind.allele_count();
    let max = config.weight_kind.max_value();
    (0..config.population_size as u64)
        .map(|id| Chromosome {
            id,
            alleles: (0..len).map(|_| rng.random_range(0..=max)).collect(),
            fitness: None,
        })
        .collect()
}

/// Roulette selection over `normalized + ε`, without replacement within the
/// pair. Returns indices into the population.
pub fn select_parents(population: &[Chromosome], rng: &mut ChaCha8Rng) -> (usize, usize) {
    assert!(population.len() >= 2, "need at least two chromosomes");
    let weights: Vec<f64> = population
        .iter()
        .map(|c| {
            c.fitness
                .as_ref()
                .and_then(|f| f.normalized)
                .expect("population is normalized before selection")
                + SELECTION_EPSILON
        })
        .collect();
    let first = spin(&weights, rng, usize::MAX);
    let second = spin(&weights, rng, first);
    (first, second)
}

fn spin(weights: &[f64], rng: &mut ChaCha8Rng, exclude: usize) -> usize {
    let total: f64 = weights
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != exclude)
        .map(|(_, w)| w)
        .sum();
    let mut ball = rng.random_range(0.0..total);
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if i == exclude {
            continue;
        }
        if ball < w {
            return i;
        }
        ball -= w;
        last = i;
    }
    last // floating-point edge: fall back to the final candidate
}

/// Single-point crossover with probability `rate`; otherwise the children
/// are copies of the parents.
pub fn crossover(
    parent_a: &[i64],
    parent_b: &[i64],
    rng: &mut ChaCha8Rng,
    rate: f64,
) -> (Vec<i64>, Vec<i64>) {
    assert_eq!(parent_a.len(), parent_b.len());
    let mut child_a = parent_a.to_vec();
    let mut child_b = parent_b.to_vec();
    if rng.random_bool(rate) {
        let cut = rng.random_range(1..parent_a.len());
        child_a[cut..].copy_from_slice(&parent_b[cut..]);
        child_b[cut..].copy_from_slice(&parent_a[cut..]);
    }
    (child_a, child_b)
}

/// With probability `rate`, resample one uniformly chosen allele over
/// `0..=max`.
pub fn mutate(alleles: &mut [i64], rng: &mut ChaCha8Rng, rate: f64, max: i64) {
    if rng.random_bool(rate) {
        let slot = rng.random_range(0..alleles.len());
        alleles[slot] = rng.random_range(0..=max);
    }
}

/// Run the GA: evaluate the initial population, then per generation select
/// parent pairs, breed children through crossover and mutation, evaluate
/// them (possibly in parallel behind the evaluator), and keep the best
/// `population_size` of the merged pool. Returns the best chromosome and the
/// per-generation history.
pub fn run_ga(
    config: &GaConfig,
    evaluator: &mut dyn ChildEvaluator,
) -> Result<(Chromosome, Vec<GenerationRecord>), GaError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut population = init_population(config, &mut rng);
    let mut next_id = population.len() as u64;
    let reports = evaluator.evaluate(&population)?;
    assign_reports(&mut population, reports);

    let mut history = Vec::with_capacity(config.generations as usize);
    for generation in 0..config.generations {
        normalize_population(&mut population);
        let mut children = Vec::with_capacity(config.children_per_generation);
        for _ in 0..config.children_per_generation / 2 {
            let (a, b) = select_parents(&population, &mut rng);
            let (mut alleles_a, mut alleles_b) = crossover(
                &population[a].alleles,
                &population[b].alleles,
                &mut rng,
                config.crossover_rate,
            );
            let max = config.weight_kind.max_value();
            mutate(&mut alleles_a, &mut rng, config.mutation_rate, max);
            mutate(&mut alleles_b, &mut rng, config.mutation_rate, max);
            for alleles in [alleles_a, alleles_b] {
                children.push(Chromosome {
                    id: next_id,
                    alleles,
                    fitness: None,
                });
                next_id += 1;
            }
        }
        let reports = evaluator.evaluate(&children)?;
        assign_reports(&mut children, reports);

        // Steady state: merge and keep the best population_size, which
        // preserves the elites unconditionally.
        population.extend(children);
        sort_by_fitness(&mut population);
        population.truncate(config.population_size);

        let best = &population[0];
        let mean_raw =
            population.iter().map(Chromosome::raw_fitness).sum::<f64>() / population.len() as f64;
        history.push(GenerationRecord {
            generation,
            best_raw: best.raw_fitness(),
            mean_raw,
            best_id: best.id,
            evaluations: config.children_per_generation as u64,
        });
    }

    sort_by_fitness(&mut population);
    Ok((population[0].clone(), history))
}

fn assign_reports(chromosomes: &mut [Chromosome], reports: Vec<FitnessReport>) {
    assert_eq!(chromosomes.len(), reports.len(), "one report per child");
    for (c, mut report) in chromosomes.iter_mut().zip(reports) {
        report.chromosome_id = c.id;
        c.fitness = Some(report);
    }
}

fn normalize_population(population: &mut [Chromosome]) {
    let raws: Vec<f64> = population.iter().map(Chromosome::raw_fitness).collect();
    let normed = normalize(&raws);
    for (c, n) in population.iter_mut().zip(normed) {
        c.fitness.as_mut().expect("evaluated").normalized = Some(n);
    }
}

/// Raw fitness descending, ids ascending on ties: a total, deterministic
/// order.
fn sort_by_fitness(population: &mut [Chromosome]) {
    population.sort_by(|a, b| {
        b.raw_fitness()
            .partial_cmp(&a.raw_fitness())
            .expect("fitness values are finite")
            .then(a.id.cmp(&b.id))
    });
}
