//! Training configuration: line-oriented `key = value`, UTF-8, `#` comments.
//! Unknown keys are errors.

use std::path::PathBuf;

use tsume_core::fitness::FitnessVariant;
use tsume_core::ga::{GaConfig, WeightKind};
use tsume_core::solver::SearchLimits;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub weight_kind: WeightKind,
    pub train_corpus: PathBuf,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub generations: u32,
    pub population: usize,
    pub children: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// None = static rank fitness; Some(v) = dynamic fitness variant.
    pub fitness: Option<FitnessVariant>,
    pub elite_count: usize,
    pub limits: SearchLimits,
    pub threads: usize,
    /// Distributed mode: listen address plus the number of workers to wait
    /// for.
    pub listen: Option<(String, usize)>,
}

impl TrainConfig {
    pub fn parse(text: &str) -> Result<TrainConfig, String> {
        let mut weight_kind = None;
        let mut train_corpus = None;
        let mut out_dir = None;
        let mut seed = None;
        let mut generations = None;
        let mut population = None;
        let mut children = None;
        let mut crossover_rate = 0.065;
        let mut mutation_rate = 0.5;
        let mut fitness = Some(FitnessVariant::NegativeNew);
        let mut elite_count = 2;
        let mut node_budget = SearchLimits::training().node_budget;
        let mut max_depth = SearchLimits::training().max_depth;
        let mut threads = std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1);
        let mut listen = None;
        let mut workers = None;

        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", n + 1))?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| format!("line {}: bad {what} `{value}`", n + 1);
            match key {
                "weight_kind" => {
                    weight_kind =
                        Some(WeightKind::from_token(value).ok_or_else(|| bad("weight kind"))?)
                }
                "train_corpus" => train_corpus = Some(PathBuf::from(value)),
                "out_dir" => out_dir = Some(PathBuf::from(value)),
                "seed" => seed = Some(value.parse().map_err(|_| bad("seed"))?),
                "generations" => generations = Some(value.parse().map_err(|_| bad("count"))?),
                "population" => population = Some(value.parse().map_err(|_| bad("count"))?),
                "children" => children = Some(value.parse().map_err(|_| bad("count"))?),
                "crossover_rate" => {
                    crossover_rate = value.parse().map_err(|_| bad("rate"))?;
                }
                "mutation_rate" => {
                    mutation_rate = value.parse().map_err(|_| bad("rate"))?;
                }
                "fitness" => {
                    fitness = if value == "static" {
                        None
                    } else {
                        let number: u8 = value.parse().map_err(|_| bad("fitness"))?;
                        Some(FitnessVariant::from_number(number).ok_or_else(|| bad("fitness"))?)
                    };
                }
                "elite_count" => elite_count = value.parse().map_err(|_| bad("count"))?,
                "node_budget" => node_budget = value.parse().map_err(|_| bad("budget"))?,
                "max_depth" => max_depth = value.parse().map_err(|_| bad("depth"))?,
                "threads" => threads = value.parse().map_err(|_| bad("count"))?,
                "listen" => listen = Some(value.to_string()),
                "workers" => workers = Some(value.parse().map_err(|_| bad("count"))?),
                other => return Err(format!("line {}: unknown key `{other}`", n + 1)),
            }
        }

        let weight_kind = weight_kind.ok_or("missing key `weight_kind`")?;
        let defaults = match weight_kind {
            WeightKind::Static => GaConfig::static_defaults(0),
            WeightKind::Dynamic => GaConfig::dynamic_defaults(0),
        };
        let listen = match (listen, workers) {
            (Some(addr), Some(n)) => Some((addr, n)),
            (None, None) => None,
            (Some(_), None) => return Err("`listen` requires `workers`".into()),
            (None, Some(_)) => return Err("`workers` requires `listen`".into()),
        };
        Ok(TrainConfig {
            weight_kind,
            train_corpus: train_corpus.ok_or("missing key `train_corpus`")?,
            out_dir: out_dir.ok_or("missing key `out_dir`")?,
            seed: seed.ok_or("missing key `seed` (runs are never wall-clock seeded)")?,
            generations: generations.unwrap_or(defaults.generations),
            population: population.unwrap_or(defaults.population_size),
            children: children.unwrap_or(defaults.children_per_generation),
            crossover_rate,
            mutation_rate,
            fitness,
            elite_count,
            limits: SearchLimits {
                node_budget,
                max_depth,
            },
            threads: threads.max(1),
            listen,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_kind_defaults() {
        let config = TrainConfig::parse(
            "weight_kind = dynamic\ntrain_corpus = a.corpus\nout_dir = out\nseed = 9\n",
        )
        .unwrap();
        assert_eq!(config.population, 22);
        assert_eq!(config.children, 22);
        assert_eq!(config.generations, 40);
        assert_eq!(config.crossover_rate, 0.065);
        assert_eq!(config.mutation_rate, 0.5);
        assert_eq!(config.fitness, Some(FitnessVariant::NegativeNew));
    }

    #[test]
    fn unknown_keys_fail_fast() {
        let err = TrainConfig::parse("weight_kind = static\nbogus = 1\n").unwrap_err();
        assert!(err.contains("unknown key"), "{err}");
    }

    #[test]
    fn static_fitness_and_comments_parse() {
        let config = TrainConfig::parse(
            "# comment\nweight_kind = static\ntrain_corpus = t\nout_dir = o\nseed = 1\nfitness = static\n",
        )
        .unwrap();
        assert_eq!(config.fitness, None);
        assert_eq!(config.population, 100);
        assert_eq!(config.children, 80);
    }

    #[test]
    fn listen_needs_workers() {
        let err = TrainConfig::parse(
            "weight_kind = static\ntrain_corpus = t\nout_dir = o\nseed = 1\nlisten = 0.0.0.0:9\n",
        )
        .unwrap_err();
        assert!(err.contains("workers"));
    }

    #[test]
    fn seed_is_mandatory() {
        let err =
            TrainConfig::parse("weight_kind = static\ntrain_corpus = t\nout_dir = o\n").unwrap_err();
        assert!(err.contains("seed"));
    }
}
