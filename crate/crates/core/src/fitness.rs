//! Fitness functions for weight vectors.
//!
//! The static fitness ranks the known unique winning move of each training
//! problem with no tree search; the dynamic fitness solves the training set
//! and aggregates leaf counts under one of four variants. Raw fitness values
//! are normalized over a population to [0,1] for selection.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use crate::heuristics::{rank_moves, DynamicWeights, SearchMemory, StaticWeights};
use crate::problems::Problem;
use crate::solver::{SearchLimits, SetEntry, Solver};

/// Bonus for the unique winning move placing 1st..5th in the root ranking.
pub const RANK_BONUS: [f64; 5] = [20.0, 13.0, 7.0, 3.0, 1.0];

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FitnessVariant {
    /// fitness = Σ tl_old² / tl_new
    OldSquaredOverNew,
    /// fitness = Σ tl_old / tl_new
    OldOverNew,
    /// fitness = Σ −tl_new
    NegativeNew,
    /// fitness = Σ 1 / tl_new (reference variant; does not favor hard
    /// problems)
    ReciprocalNew,
}

impl FitnessVariant {
    pub fn from_number(n: u8) -> Option<FitnessVariant> {
        match n {
            1 => Some(FitnessVariant::OldSquaredOverNew),
            2 => Some(FitnessVariant::OldOverNew),
            3 => Some(FitnessVariant::NegativeNew),
            4 => Some(FitnessVariant::ReciprocalNew),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            FitnessVariant::OldSquaredOverNew => 1,
            FitnessVariant::OldOverNew => 2,
            FitnessVariant::NegativeNew => 3,
            FitnessVariant::ReciprocalNew => 4,
        }
    }

    pub fn needs_reference(self) -> bool {
        matches!(
            self,
            FitnessVariant::OldSquaredOverNew | FitnessVariant::OldOverNew
        )
    }

    /// One problem's contribution to the raw fitness.
    pub fn term(self, tl_old: u64, tl_new: u64) -> f64 {
        let old = tl_old as f64;
        let new = tl_new as f64;
        match self {
            FitnessVariant::OldSquaredOverNew => old * old / new,
            FitnessVariant::OldOverNew => old / new,
            FitnessVariant::NegativeNew => -new,
            FitnessVariant::ReciprocalNew => 1.0 / new,
        }
    }
}

impl fmt::Display for FitnessVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Evaluation outcome for one chromosome over a whole training set.
#[derive(Clone, PartialEq, Debug)]
pub struct FitnessReport {
    pub chromosome_id: u64,
    pub raw: f64,
    /// Filled in once the population is normalized.
    pub normalized: Option<f64>,
    /// Per problem, in corpus order: leaf counts for dynamic evaluation, the
    /// 1-based rank of the winning move for static evaluation.
    pub per_problem: Vec<(String, u64)>,
}

impl FitnessReport {
    /// CSV rows `chromosome_id,problem_id,tl_new` plus a summary row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("chromosome_id,problem_id,tl_new\n");
        for (id, value) in &self.per_problem {
            out.push_str(&format!("{},{},{}\n", self.chromosome_id, id, value));
        }
        out.push_str(&format!("{},total,{}\n", self.chromosome_id, self.raw));
        out
    }
}

/// Leaf counts of the reference (pre-optimization) weights, keyed by problem
/// id.
#[derive(Clone, PartialEq, Debug)]
pub struct ReferenceLeaves {
    map: BTreeMap<String, u64>,
    corpus_hash: u64,
    limits: SearchLimits,
}

impl ReferenceLeaves {
    pub fn get(&self, problem_id: &str) -> Option<u64> {
        self.map.get(problem_id).copied()
    }

    pub fn matches(&self, corpus_hash: u64, limits: SearchLimits) -> bool {
        self.corpus_hash == corpus_hash && self.limits == limits
    }

    /// Solve the training set once with the shipped original weights.
    pub fn compute(problems: &[Problem], corpus_hash: u64, limits: SearchLimits) -> ReferenceLeaves {
        let entries = Solver::new().solve_set(
            problems,
            &StaticWeights::original(),
            &DynamicWeights::original(),
            limits,
        );
        ReferenceLeaves {
            map: entries
                .into_iter()
                .map(|e| (e.problem_id, e.leaves))
                .collect(),
            corpus_hash,
            limits,
        }
    }

    /// Load from the on-disk cache, or compute and cache. The cache key is
    /// the corpus hash plus the limits; a stale file is recomputed.
    pub fn load_or_compute(
        cache_path: &Path,
        problems: &[Problem],
        corpus_hash: u64,
        limits: SearchLimits,
    ) -> ReferenceLeaves {
        if let Ok(text) = fs::read_to_string(cache_path) {
            if let Some(reference) = ReferenceLeaves::parse(&text) {
                if reference.matches(corpus_hash, limits) {
                    return reference;
                }
            }
        }
        let reference = ReferenceLeaves::compute(problems, corpus_hash, limits);
        let _ = fs::write(cache_path, reference.serialize());
        reference
    }

    fn serialize(&self) -> String {
        let mut out = format!(
            "refleaves {:016x} {} {}\n",
            self.corpus_hash, self.limits.node_budget, self.limits.max_depth
        );
        for (id, leaves) in &self.map {
            out.push_str(&format!("{id} {leaves}\n"));
        }
        out
    }

    fn parse(text: &str) -> Option<ReferenceLeaves> {
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next()?.split_whitespace().collect();
        let [tag, hash, budget, depth] = header.as_slice() else {
            return None;
        };
        if *tag != "refleaves" {
            return None;
        }
        let corpus_hash = u64::from_str_radix(hash, 16).ok()?;
        let limits = SearchLimits {
            node_budget: budget.parse().ok()?,
            max_depth: depth.parse().ok()?,
        };
        let mut map = BTreeMap::new();
        for line in lines {
            let (id, leaves) = line.split_once(' ')?;
            map.insert(id.to_string(), leaves.parse().ok()?);
        }
        Some(ReferenceLeaves {
            map,
            corpus_hash,
            limits,
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FitnessError {
    /// A training problem has no stored unique winning move.
    MissingWinningMove(String),
    /// Variants 1 and 2 need reference leaves for every training problem.
    MissingReference(String),
}

impl fmt::Display for FitnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitnessError::MissingWinningMove(id) => {
                write!(f, "problem {id} has no unique winning move")
            }
            FitnessError::MissingReference(id) => {
                write!(f, "no reference leaves for problem {id}")
            }
        }
    }
}

impl std::error::Error for FitnessError {}

/// Bonus for a 1-based rank of the winning move.
pub fn rank_bonus(rank: usize) -> f64 {
    if rank >= 1 && rank <= RANK_BONUS.len() {
        RANK_BONUS[rank - 1]
    } else {
        0.0
    }
}

/// Rank the unique winning move of every training problem at the root with
/// empty search memory; no tree search is performed.
pub fn static_fitness(
    chromosome_id: u64,
    sw: &StaticWeights,
    problems: &[Problem],
    dw_fixed: &DynamicWeights,
) -> Result<FitnessReport, FitnessError> {
    let mem = SearchMemory::new();
    let mut raw = 0.0;
    let mut per_problem = Vec::with_capacity(problems.len());
    for problem in problems {
        let Some(winning) = problem.unique_winning_move else {
            return Err(FitnessError::MissingWinningMove(problem.id.clone()));
        };
        let ranked = rank_moves(
            &problem.board,
            problem.to_move,
            sw,
            dw_fixed,
            &mem,
            problem.target,
        );
        let rank = ranked
            .iter()
            .position(|&(m, _)| m == winning)
            .map(|i| i + 1)
            .unwrap_or(usize::MAX);
        raw += rank_bonus(rank);
        per_problem.push((problem.id.clone(), rank as u64));
    }
    Ok(FitnessReport {
        chromosome_id,
        raw,
        normalized: None,
        per_problem,
    })
}

/// Solve the whole training set with the chromosome's weights and aggregate
/// leaf counts under `variant`. Budget overruns contribute `tl_new =
/// node_budget` (the solve-set convention).
pub fn dynamic_fitness(
    chromosome_id: u64,
    solver: &mut Solver,
    sw: &StaticWeights,
    dw: &DynamicWeights,
    problems: &[Problem],
    variant: FitnessVariant,
    reference: Option<&ReferenceLeaves>,
    limits: SearchLimits,
) -> Result<FitnessReport, FitnessError> {
    let entries = solver.solve_set(problems, sw, dw, limits);
    raw_from_entries(chromosome_id, &entries, variant, reference)
}

/// Aggregate already-solved leaf counts; shared by local and remote
/// evaluation paths.
pub fn raw_from_entries(
    chromosome_id: u64,
    entries: &[SetEntry],
    variant: FitnessVariant,
    reference: Option<&ReferenceLeaves>,
) -> Result<FitnessReport, FitnessError> {
    let mut raw = 0.0;
    let mut per_problem = Vec::with_capacity(entries.len());
    for entry in entries {
        let tl_old = if variant.needs_reference() {
            reference
                .and_then(|r| r.get(&entry.problem_id))
                .ok_or_else(|| FitnessError::MissingReference(entry.problem_id.clone()))?
        } else {
            1
        };
        raw += variant.term(tl_old, entry.leaves);
        per_problem.push((entry.problem_id.clone(), entry.leaves));
    }
    Ok(FitnessReport {
        chromosome_id,
        raw,
        normalized: None,
        per_problem,
    })
}

/// Shift and linearly scale raw fitness values into [0,1]. When all values
/// are equal, everything maps to 0.5 so selection stays well-defined.
pub fn normalize(raws: &[f64]) -> Vec<f64> {
    assert!(!raws.is_empty(), "normalize needs at least one value");
    let min = raws.iter().copied().fold(f64::INFINITY, f64::min);
    let max = raws.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return vec![0.5; raws.len()];
    }
    raws.iter().map(|&x| (x - min) / (max - min)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goban::Color;
    use crate::problems::{generate_corpus, GenParams};
    use crate::solver::nodes_expanded_total;

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

    #[test]
    fn substitution_table_for_all_variants() {
        assert_eq!(FitnessVariant::OldSquaredOverNew.term(100, 50), 200.0);
        assert_eq!(FitnessVariant::OldOverNew.term(100, 50), 2.0);
        assert_eq!(FitnessVariant::NegativeNew.term(100, 50), -50.0);
        assert_eq!(FitnessVariant::ReciprocalNew.term(100, 50), 0.02);
    }

    #[test]
    fn equal_leaves_make_variant_two_count_problems() {
        let n = 17;
        let raw: f64 = (0..n).map(|_| FitnessVariant::OldOverNew.term(64, 64)).sum();
        assert_eq!(raw, n as f64);
    }

    #[test]
    fn every_variant_is_strictly_decreasing_in_new_leaves() {
        for variant in [
            FitnessVariant::OldSquaredOverNew,
            FitnessVariant::OldOverNew,
            FitnessVariant::NegativeNew,
            FitnessVariant::ReciprocalNew,
        ] {
            for tl_old in [1u64, 10, 1000] {
                assert!(variant.term(tl_old, 10) > variant.term(tl_old, 11));
            }
        }
    }

    #[test]
    fn hard_problem_emphasis() {
        // Two problems currently solving at the same cost; reduce each by
        // the same 10 leaves. Variant 1 pays more for the one that was
        // harder for the reference weights, variant 3 pays both equally.
        let small = FitnessVariant::OldSquaredOverNew.term(100, 90)
            - FitnessVariant::OldSquaredOverNew.term(100, 100);
        let large = FitnessVariant::OldSquaredOverNew.term(1000, 90)
            - FitnessVariant::OldSquaredOverNew.term(1000, 100);
        assert!(large > small, "variant 1 rewards the harder problem more");

        let small = FitnessVariant::NegativeNew.term(100, 90)
            - FitnessVariant::NegativeNew.term(100, 100);
        let large = FitnessVariant::NegativeNew.term(1000, 90)
            - FitnessVariant::NegativeNew.term(1000, 100);
        assert_eq!(large, small, "variant 3 is indifferent to problem size");
    }

    #[test]
    fn rank_bonus_tuple() {
        assert_eq!(rank_bonus(1), 20.0);
        assert_eq!(rank_bonus(2), 13.0);
        assert_eq!(rank_bonus(3), 7.0);
        assert_eq!(rank_bonus(4), 3.0);
        assert_eq!(rank_bonus(5), 1.0);
        assert_eq!(rank_bonus(6), 0.0);
        assert_eq!(rank_bonus(usize::MAX), 0.0);
        // Ranks 1, 2, 5 over a three-problem set.
        assert_eq!(rank_bonus(1) + rank_bonus(2) + rank_bonus(5), 34.0);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&[-50.0, -100.0, -150.0]), vec![1.0, 0.5, 0.0]);
        assert_eq!(normalize(&[7.0]), vec![0.5]);
        assert_eq!(normalize(&[0.0, 10.0]), vec![0.0, 1.0]);
    }

    #[test]
    fn normalize_preserves_order() {
        let raws = [3.0, -1.0, 8.0, 0.0, 7.5];
        let normed = normalize(&raws);
        for i in 0..raws.len() {
            for j in 0..raws.len() {
                assert_eq!(
                    raws[i] < raws[j],
                    normed[i] < normed[j],
                    "order changed at {i},{j}"
                );
            }
        }
    }

    #[test]
    fn static_fitness_expands_no_solver_nodes() {
        let problems = small_corpus(31, 3);
        let before = nodes_expanded_total();
        let report = static_fitness(
            7,
            &StaticWeights([500; 12]),
            &problems,
            &DynamicWeights::zeros(),
        )
        .unwrap();
        assert_eq!(nodes_expanded_total(), before, "no tree search allowed");
        assert_eq!(report.per_problem.len(), problems.len());
        let from_ranks: f64 = report
            .per_problem
            .iter()
            .map(|&(_, rank)| rank_bonus(rank as usize))
            .sum();
        assert_eq!(report.raw, from_ranks);
    }

    #[test]
    fn static_fitness_requires_winning_moves() {
        let mut problems = small_corpus(31, 1);
        problems[0].unique_winning_move = None;
        let err = static_fitness(
            0,
            &StaticWeights::zeros(),
            &problems,
            &DynamicWeights::zeros(),
        )
        .unwrap_err();
        assert!(matches!(err, FitnessError::MissingWinningMove(_)));
    }

    #[test]
    fn variant_three_is_negated_total_leaves() {
        let problems = small_corpus(32, 3);
        let mut solver = Solver::new();
        let limits = SearchLimits::default();
        let report = dynamic_fitness(
            1,
            &mut solver,
            &StaticWeights::zeros(),
            &DynamicWeights::zeros(),
            &problems,
            FitnessVariant::NegativeNew,
            None,
            limits,
        )
        .unwrap();
        let entries = Solver::new().solve_set(
            &problems,
            &StaticWeights::zeros(),
            &DynamicWeights::zeros(),
            limits,
        );
        let total: u64 = entries.iter().map(|e| e.leaves).sum();
        assert_eq!(report.raw, -(total as f64));
        assert_eq!(
            report.per_problem,
            entries
                .iter()
                .map(|e| (e.problem_id.clone(), e.leaves))
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn reference_variants_require_reference() {
        let problems = small_corpus(32, 2);
        let mut solver = Solver::new();
        let err = dynamic_fitness(
            1,
            &mut solver,
            &StaticWeights::zeros(),
            &DynamicWeights::zeros(),
            &problems,
            FitnessVariant::OldOverNew,
            None,
            SearchLimits::default(),
        )
        .unwrap_err();
        assert!(matches!(err, FitnessError::MissingReference(_)));
    }

    #[test]
    fn reference_leaves_cache_round_trip() {
        let problems = small_corpus(33, 2);
        let limits = SearchLimits::default();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("train.refleaves");
        let a = ReferenceLeaves::load_or_compute(&path, &problems, 0xabcd, limits);
        assert!(path.exists());
        let b = ReferenceLeaves::load_or_compute(&path, &problems, 0xabcd, limits);
        assert_eq!(a, b);
        // A different corpus hash invalidates the cache.
        let c = ReferenceLeaves::load_or_compute(&path, &problems, 0xffff, limits);
        assert!(c.matches(0xffff, limits));
    }

    #[test]
    fn report_csv_has_summary_row() {
        let report = FitnessReport {
            chromosome_id: 9,
            raw: -321.0,
            normalized: None,
            per_problem: vec![("p1".into(), 100), ("p2".into(), 221)],
        };
        let csv = report.to_csv();
        assert!(csv.starts_with("chromosome_id,problem_id,tl_new\n"));
        assert!(csv.contains("9,p1,100\n"));
        assert!(csv.ends_with("9,total,-321\n"));
    }
}
