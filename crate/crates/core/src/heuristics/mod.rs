//! Move-ordering heuristics: static board features, dynamic bonuses fed by
//! search memory, and the weighted ranking that orders moves before
//! expansion.
//!
//! All score arithmetic is 64-bit integer, so rankings (and therefore leaf
//! counts) are identical across platforms.

mod features;

pub use features::FeatureContext;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::goban::{Board, Color, Move, Point};

pub const STATIC_WEIGHT_COUNT: usize = 12;
pub const DYNAMIC_WEIGHT_COUNT: usize = 10;
pub const STATIC_WEIGHT_MAX: i64 = 1000;
pub const DYNAMIC_WEIGHT_MAX: i64 = 10_000;

/// Win counts saturate here; see [`dynamic_bonus`].
pub const HISTORY_CAP: u32 = 8;

/// Score units per weight point. Scores carry this factor so that every
/// term, including the fractional history bonus (an eighth of `dw[0]` at
/// saturation), stays exactly linear in the weights under 64-bit integer
/// arithmetic; uniform weight scaling then provably never reorders moves.
pub const SCORE_UNIT: i64 = 64;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightError(pub String);

impl fmt::Display for WeightError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for WeightError {}

/// Weights over features of the current board position, one per static rule,
/// each in `[0, 1000]`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct StaticWeights(pub [i64; STATIC_WEIGHT_COUNT]);

/// Weights over information gathered during the ongoing tree search, each in
/// `[0, 10000]`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DynamicWeights(pub [i64; DYNAMIC_WEIGHT_COUNT]);

impl StaticWeights {
    pub fn zeros() -> StaticWeights {
        StaticWeights([0; STATIC_WEIGHT_COUNT])
    }

    /// The shipped pre-training values. The solver ships untuned: all rules
    /// disabled until a trained weight file says otherwise.
    pub fn original() -> StaticWeights {
        StaticWeights::zeros()
    }

    pub fn from_alleles(alleles: &[i64]) -> Result<StaticWeights, WeightError> {
        let values: [i64; STATIC_WEIGHT_COUNT] = alleles
            .try_into()
            .map_err(|_| WeightError(format!("expected {STATIC_WEIGHT_COUNT} static weights")))?;
        let out = StaticWeights(values);
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<(), WeightError> {
        validate_range(&self.0, STATIC_WEIGHT_MAX)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
}

impl DynamicWeights {
    pub fn zeros() -> DynamicWeights {
        DynamicWeights([0; DYNAMIC_WEIGHT_COUNT])
    }

    /// The shipped pre-training values; see [`StaticWeights::original`].
    pub fn original() -> DynamicWeights {
        DynamicWeights::zeros()
    }

    pub fn from_alleles(alleles: &[i64]) -> Result<DynamicWeights, WeightError> {
        let values: [i64; DYNAMIC_WEIGHT_COUNT] = alleles
            .try_into()
            .map_err(|_| WeightError(format!("expected {DYNAMIC_WEIGHT_COUNT} dynamic weights")))?;
        let out = DynamicWeights(values);
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<(), WeightError> {
        validate_range(&self.0, DYNAMIC_WEIGHT_MAX)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
}

fn validate_range(values: &[i64], max: i64) -> Result<(), WeightError> {
    for (i, &w) in values.iter().enumerate() {
        if !(0..=max).contains(&w) {
            return Err(WeightError(format!(
                "weight {i} is {w}, outside [0, {max}]"
            )));
        }
    }
    Ok(())
}

/// Per-node context the search installs before ranking a node's moves.
#[derive(Clone, Default, Debug)]
pub struct NodeContext {
    /// The opponent's top-2 ranked moves in the parent position.
    pub prev_favored: Vec<Move>,
    /// Most recent winning move of the side not to move at this depth.
    pub last_opponent_win: Option<Move>,
    /// Best move from the transposition entry for the current hash, if any.
    pub tt_suggestion: Option<Move>,
    /// Points that are currently illegal or self-atari for the opponent.
    pub useless_for_opponent: Vec<Point>,
}

/// Information gathered during the tree search so far. Owned by exactly one
/// search instance; cleared between problems.
#[derive(Clone, Default, Debug)]
pub struct SearchMemory {
    win_count: HashMap<(Point, Color), u32>,
    per_depth_wins: Vec<[Option<Move>; 2]>,
    recent_wins: VecDeque<Move>,
    /// Most recently observed refuting reply anywhere in the search.
    pub refutation: Option<Move>,
    pub node: NodeContext,
}

impl SearchMemory {
    pub fn new() -> SearchMemory {
        SearchMemory::default()
    }

    pub fn clear(&mut self) {
        *self = SearchMemory::default();
    }

    pub fn win_count(&self, p: Point, color: Color) -> u32 {
        self.win_count.get(&(p, color)).copied().unwrap_or(0)
    }

    /// Record a proven winning move for `color` at `depth`.
    pub fn record_win(&mut self, mv: Move, color: Color, depth: u32) {
        if let Move::Play(p) = mv {
            *self.win_count.entry((p, color)).or_insert(0) += 1;
        }
        let depth = depth as usize;
        if self.per_depth_wins.len() <= depth {
            self.per_depth_wins.resize(depth + 1, [None, None]);
        }
        self.per_depth_wins[depth][color.index()] = Some(mv);
        self.recent_wins.push_front(mv);
        self.recent_wins.truncate(2);
    }

    pub fn last_win_at(&self, depth: u32, color: Color) -> Option<Move> {
        self.per_depth_wins
            .get(depth as usize)
            .and_then(|slot| slot[color.index()])
    }

    pub fn recent_win(&self, mv: Move) -> bool {
        self.recent_wins.contains(&mv)
    }

    pub fn note_refutation(&mut self, mv: Move) {
        self.refutation = Some(mv);
    }

    /// Scale every win count by `numerator/1000` (numerators above 1000 mean
    /// no decay).
    pub fn decay_win_counts(&mut self, numerator: i64) {
        let factor = numerator.clamp(0, 1000) as u64;
        if factor == 1000 {
            return;
        }
        self.win_count.retain(|_, count| {
            *count = ((*count as u64 * factor) / 1000) as u32;
            *count > 0
        });
    }

    /// Install per-node context, returning the previous one for restoration
    /// when the node is left.
    pub fn swap_node_context(&mut self, node: NodeContext) -> NodeContext {
        std::mem::replace(&mut self.node, node)
    }
}

/// Score contribution from search memory for one candidate move, in
/// [`SCORE_UNIT`]s.
///
/// The history term saturates at an eighth of `dw[0]`: with the cap at 8 and
/// one weight point worth 64 score units, that is exactly `dw[0] *
/// min(count, 8)` units. `dw[7]` is not scored here; it is the decay
/// numerator applied to win counts each time the search returns to the root.
/// `dw[9]` is a flat pass penalty.
pub fn dynamic_bonus(mv: Move, mover: Color, dw: &DynamicWeights, mem: &SearchMemory) -> i64 {
    let w = &dw.0;
    let mut bonus = 0i64;
    match mv {
        Move::Pass => bonus -= w[9] * SCORE_UNIT,
        Move::Play(p) => {
            let count = mem.win_count(p, mover).min(HISTORY_CAP) as i64;
            bonus += w[0] * count;
            if mem.node.useless_for_opponent.contains(&p) {
                bonus -= w[1] * SCORE_UNIT;
            }
        }
    }
    if mem.node.prev_favored.first() == Some(&mv) {
        bonus += w[2] * SCORE_UNIT;
    }
    if mem.node.prev_favored.get(1) == Some(&mv) {
        bonus += w[3] * SCORE_UNIT;
    }
    if mem.node.last_opponent_win == Some(mv) {
        bonus += w[4] * SCORE_UNIT;
    }
    if mem.node.tt_suggestion == Some(mv) {
        bonus += w[5] * SCORE_UNIT;
    }
    if mem.refutation == Some(mv) {
        bonus += w[6] * SCORE_UNIT;
    }
    if mem.recent_win(mv) {
        bonus += w[8] * SCORE_UNIT;
    }
    bonus
}

/// The twelve static features of a candidate move. Pass scores zero on all
/// of them by convention.
pub fn static_features(
    board: &Board,
    mover: Color,
    mv: Point,
    target: Point,
) -> [i64; STATIC_WEIGHT_COUNT] {
    FeatureContext::new(board, mover, target).features(mv)
}

/// Weighted static score in [`SCORE_UNIT`]s; the self-atari feature
/// (index 6) enters negatively.
pub fn static_score(sw: &StaticWeights, features: &[i64; STATIC_WEIGHT_COUNT]) -> i64 {
    let mut score = 0i64;
    for (i, (&w, &f)) in sw.0.iter().zip(features.iter()).enumerate() {
        if i == 6 {
            score -= w * f * SCORE_UNIT;
        } else {
            score += w * f * SCORE_UNIT;
        }
    }
    score
}

/// Rank all legal moves for `mover`, highest score first. Ties keep
/// row-major point order with Pass last.
pub fn rank_moves(
    board: &Board,
    mover: Color,
    sw: &StaticWeights,
    dw: &DynamicWeights,
    mem: &SearchMemory,
    target: Point,
) -> Vec<(Move, i64)> {
    let moves = board.legal_moves(mover);
    let ctx = if sw.is_zero() {
        None
    } else {
        Some(FeatureContext::new(board, mover, target))
    };
    let mut scored: Vec<(Move, i64)> = moves
        .into_iter()
        .map(|mv| {
            let mut score = dynamic_bonus(mv, mover, dw, mem);
            if let (Some(ctx), Move::Play(p)) = (&ctx, mv) {
                score += static_score(sw, &ctx.features(p));
            }
            (mv, score)
        })
        .collect();
    scored.sort_by(|a, b| b.1.cmp(&a.1)); // stable: ties keep canonical order
    scored
}

/// Contents of a weight file: one `static:` and/or one `dynamic:` line of
/// space-separated integers. Missing kinds default to zeros (disabled).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightFile {
    pub static_weights: Option<StaticWeights>,
    pub dynamic_weights: Option<DynamicWeights>,
}

impl WeightFile {
    pub fn static_or_zeros(&self) -> StaticWeights {
        self.static_weights.unwrap_or_else(StaticWeights::zeros)
    }

    pub fn dynamic_or_zeros(&self) -> DynamicWeights {
        self.dynamic_weights.unwrap_or_else(DynamicWeights::zeros)
    }
}

pub fn parse_weight_file(text: &str) -> Result<WeightFile, WeightError> {
    let mut file = WeightFile {
        static_weights: None,
        dynamic_weights: None,
    };
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (kind, rest) = line
            .split_once(':')
            .ok_or_else(|| WeightError(format!("line {}: expected `static:` or `dynamic:`", n + 1)))?;
        let values: Vec<i64> = rest
            .split_whitespace()
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| WeightError(format!("line {}: bad integer `{t}`", n + 1)))
            })
            .collect::<Result<_, _>>()?;
        match kind {
            "static" => {
                if file.static_weights.is_some() {
                    return Err(WeightError(format!("line {}: duplicate static line", n + 1)));
                }
                file.static_weights = Some(StaticWeights::from_alleles(&values)?);
            }
            "dynamic" => {
                if file.dynamic_weights.is_some() {
                    return Err(WeightError(format!(
                        "line {}: duplicate dynamic line",
                        n + 1
                    )));
                }
                file.dynamic_weights = Some(DynamicWeights::from_alleles(&values)?);
            }
            other => {
                return Err(WeightError(format!(
                    "line {}: unknown weight kind `{other}`",
                    n + 1
                )))
            }
        }
    }
    if file.static_weights.is_none() && file.dynamic_weights.is_none() {
        return Err(WeightError("weight file has no weight lines".to_string()));
    }
    Ok(file)
}

pub fn format_weight_file(
    static_weights: Option<&StaticWeights>,
    dynamic_weights: Option<&DynamicWeights>,
) -> String {
    let mut out = String::new();
    if let Some(sw) = static_weights {
        out.push_str("static:");
        for w in sw.0 {
            out.push_str(&format!(" {w}"));
        }
        out.push('\n');
    }
    if let Some(dw) = dynamic_weights {
        out.push_str("dynamic:");
        for w in dw.0 {
            out.push_str(&format!(" {w}"));
        }
        out.push('\n');
    }
    out
}
