//! Static feature extraction.
//!
//! The twelve features of a candidate move, in order:
//!
//!  0. F1  on a potential eye-point at taxicab distance 2 from the edge of
//!     its eyespace region (the eye-splitting point)
//!  1. F2  completes one or more one-point eyes for either side
//!  2. F3  adjacent to two distinct weak (≤2 liberties) chains of one color
//!  3. F4  on a 1-2 point of the enclosed region's corners
//!  4. F5  captures an opponent chain in atari
//!  5. F6  extends an own chain out of atari
//!  6. F7  self-atari (scored as a penalty)
//!  7. F8  net liberty differential, clamped to [0,4]
//!  8. F9  adjacent to the target chain
//!  9. F10 inside the opponent's largest eyespace
//! 10. F11 adjacent to the boundary wall
//! 11. F12 number of opponent chains put in atari, clamped to [0,3]
//!
//! Eyespaces: an empty region whose border stones are all one color (or
//! immortal, of either color) belongs to that color. A one-point eyespace is
//! a true eye unless mortal opponent stones hold too many of its live
//! diagonals (one suffices when walls or the board edge cut the diagonal
//! count below four).

use crate::goban::{Board, Chain, Color, Move, Point};

use super::STATIC_WEIGHT_COUNT;

pub struct FeatureContext<'a> {
    board: &'a Board,
    mover: Color,
    chains: Vec<Chain>,
    /// Chain index per cell, `u8::MAX` for empties.
    chain_of: Vec<u8>,
    /// Points adjacent to the target chain.
    target_adjacent: Vec<bool>,
    regions: Vec<EyeRegion>,
    /// Region index per empty cell.
    region_of: Vec<u8>,
    /// Index into `regions` of the opponent's largest eyespace, if any.
    opp_largest_region: Option<u8>,
    one_two_points: Vec<Point>,
    eyes_before: [u32; 2],
}

struct EyeRegion {
    points: Vec<Point>,
    owners: [bool; 2],
}

impl<'a> FeatureContext<'a> {
    pub fn new(board: &'a Board, mover: Color, target: Point) -> FeatureContext<'a> {
        let n = board.width() as usize * board.height() as usize;
        let chains = board.chains();
        let mut chain_of = vec![u8::MAX; n];
        for (ci, chain) in chains.iter().enumerate() {
            for &p in &chain.points {
                chain_of[cell_index(board, p)] = ci as u8;
            }
        }

        let mut target_adjacent = vec![false; n];
        if board.cell(target).is_some() {
            let target_chain = chain_of[cell_index(board, target)];
            for p in board.points() {
                if board
                    .neighbors(p)
                    .any(|q| chain_of[cell_index(board, q)] == target_chain)
                {
                    target_adjacent[cell_index(board, p)] = true;
                }
            }
        }

        let (regions, region_of) = empty_regions(board);
        let opp = mover.opponent();
        let mut opp_largest_region = None;
        for (ri, region) in regions.iter().enumerate() {
            if !region.owners[opp.index()] {
                continue;
            }
            match opp_largest_region {
                Some(best) => {
                    if region.points.len() > regions[best as usize].points.len() {
                        opp_largest_region = Some(ri as u8);
                    }
                }
                None => opp_largest_region = Some(ri as u8),
            }
        }

        FeatureContext {
            board,
            mover,
            chains,
            chain_of,
            target_adjacent,
            regions,
            region_of,
            opp_largest_region,
            one_two_points: one_two_points(board),
            eyes_before: [
                true_eye_count(board, Color::Black),
                true_eye_count(board, Color::White),
            ],
        }
    }

    /// Features of a legal point move for the context's mover.
    pub fn features(&self, p: Point) -> [i64; STATIC_WEIGHT_COUNT] {
        let board = self.board;
        let mover = self.mover;
        let opp = mover.opponent();
        let i = cell_index(board, p);
        debug_assert!(board.cell(p).is_none(), "feature point must be empty");

        let mut f = [0i64; STATIC_WEIGHT_COUNT];

        // Distinct adjacent chains, by index.
        let mut adjacent: Vec<u8> = Vec::with_capacity(4);
        for q in board.neighbors(p) {
            let ci = self.chain_of[cell_index(board, q)];
            if ci != u8::MAX && !adjacent.contains(&ci) {
                adjacent.push(ci);
            }
        }

        // F1: eye-splitting point inside an owned eyespace — a point whose
        // removal disconnects the region (the middle of a three-space eye
        // and friends).
        let region = self.region_of[i];
        if region != u8::MAX {
            let r = &self.regions[region as usize];
            if (r.owners[0] || r.owners[1]) && r.points.len() >= 3 && self.splits_region(p, r) {
                f[0] = 1;
            }
        }

        let child = board
            .play(mover, Move::Play(p))
            .expect("feature moves are legal");

        // F2: eye completion for either side.
        let eyes_after = [
            true_eye_count(&child, Color::Black),
            true_eye_count(&child, Color::White),
        ];
        if eyes_after[0] > self.eyes_before[0] || eyes_after[1] > self.eyes_before[1] {
            f[1] = 1;
        }

        // F3: splits two weak chains of one color.
        for color in [Color::Black, Color::White] {
            let weak = adjacent
                .iter()
                .map(|&ci| &self.chains[ci as usize])
                .filter(|c| c.color == color && !c.immortal && c.liberties.len() <= 2)
                .count();
            if weak >= 2 {
                f[2] = 1;
            }
        }

        // F4: 1-2 points of the enclosed region's corners.
        if self.one_two_points.contains(&p) {
            f[3] = 1;
        }

        let own_before: Vec<&Chain> = adjacent
            .iter()
            .map(|&ci| &self.chains[ci as usize])
            .filter(|c| c.color == mover)
            .collect();
        let opp_mortal: Vec<&Chain> = adjacent
            .iter()
            .map(|&ci| &self.chains[ci as usize])
            .filter(|c| c.color == opp && !c.immortal)
            .collect();

        // F5: captures a chain in atari. An adjacent chain in atari has this
        // point as its last liberty.
        if opp_mortal.iter().any(|c| c.liberties.len() == 1) {
            f[4] = 1;
        }

        let after_libs = child
            .chain_at(p)
            .expect("played stone forms a chain")
            .liberties
            .len();

        // F6: extends an own chain out of atari.
        if own_before.iter().any(|c| c.liberties.len() == 1) && after_libs >= 2 {
            f[5] = 1;
        }

        // F7: self-atari.
        if after_libs == 1 {
            f[6] = 1;
        }

        // F8: net liberty differential.
        let own_base = own_before
            .iter()
            .map(|c| c.liberties.len())
            .max()
            .unwrap_or(0);
        let gained = after_libs as i64 - own_base as i64;
        let reduced = opp_mortal.len() as i64;
        f[7] = (gained - reduced).clamp(0, 4);

        // F9: adjacent to the target chain.
        if self.target_adjacent[i] {
            f[8] = 1;
        }

        // F10: inside the opponent's largest eyespace.
        if let Some(best) = self.opp_largest_region {
            if region == best {
                f[9] = 1;
            }
        }

        // F11: adjacent to the boundary wall.
        if board.neighbors(p).any(|q| board.is_immortal(q)) {
            f[10] = 1;
        }

        // F12: opponent chains put in atari (two liberties before, one
        // after; captures and merges cannot refill them).
        f[11] = (opp_mortal
            .iter()
            .filter(|c| c.liberties.len() == 2)
            .count() as i64)
            .clamp(0, 3);

        f
    }

    /// Does removing `p` disconnect its eyespace region?
    fn splits_region(&self, p: Point, region: &EyeRegion) -> bool {
        let rest: Vec<Point> = region.points.iter().copied().filter(|&q| q != p).collect();
        let Some(&start) = rest.first() else {
            return false;
        };
        let mut seen = vec![start];
        let mut stack = vec![start];
        while let Some(q) = stack.pop() {
            for n in self.board.neighbors(q) {
                if n != p && rest.contains(&n) && !seen.contains(&n) {
                    seen.push(n);
                    stack.push(n);
                }
            }
        }
        seen.len() < rest.len()
    }
}

fn cell_index(board: &Board, p: Point) -> usize {
    p.y as usize * board.width() as usize + p.x as usize
}

/// Maximal connected empty regions with their border-ownership flags.
fn empty_regions(board: &Board) -> (Vec<EyeRegion>, Vec<u8>) {
    let n = board.width() as usize * board.height() as usize;
    let mut region_of = vec![u8::MAX; n];
    let mut regions: Vec<EyeRegion> = Vec::new();
    for start in board.points() {
        let si = cell_index(board, start);
        if board.cell(start).is_some() || region_of[si] != u8::MAX {
            continue;
        }
        let id = regions.len() as u8;
        let mut points = Vec::new();
        let mut border_colors = [false; 2]; // saw a mortal-or-immortal stone of color
        let mut border_mixed = [false; 2]; // saw a *hostile* stone for color: mortal opponent
        let mut stack = vec![start];
        region_of[si] = id;
        while let Some(p) = stack.pop() {
            points.push(p);
            for q in board.neighbors(p) {
                match board.cell(q) {
                    None => {
                        let qi = cell_index(board, q);
                        if region_of[qi] == u8::MAX {
                            region_of[qi] = id;
                            stack.push(q);
                        }
                    }
                    Some(c) => {
                        border_colors[c.index()] = true;
                        if !board.is_immortal(q) {
                            // A mortal stone of color c poisons the region
                            // for the other color.
                            border_mixed[c.opponent().index()] = true;
                        }
                    }
                }
            }
        }
        points.sort();
        let owners = [
            border_colors[0] && !border_mixed[0],
            border_colors[1] && !border_mixed[1],
        ];
        regions.push(EyeRegion { points, owners });
    }
    (regions, region_of)
}

/// Count one-point true eyes for `color`: empty points whose orthogonal
/// neighbors all qualify for the color and whose diagonals pass the
/// false-eye criterion (immortal stones and the board edge count as neutral).
pub(crate) fn true_eye_count(board: &Board, color: Color) -> u32 {
    let mut count = 0;
    for p in board.points() {
        if board.cell(p).is_some() {
            continue;
        }
        let mut own_border = false;
        let mut qualified = true;
        for q in board.neighbors(p) {
            match board.cell(q) {
                None => qualified = false,
                Some(c) => {
                    if c == color {
                        own_border = true;
                    } else if !board.is_immortal(q) {
                        qualified = false;
                    }
                }
            }
        }
        if !qualified || !own_border {
            continue;
        }
        let mut live_diagonals = 0;
        let mut hostile = 0;
        for q in board.diagonals(p) {
            if board.is_immortal(q) {
                continue;
            }
            live_diagonals += 1;
            if board.cell(q) == Some(color.opponent()) {
                hostile += 1;
            }
        }
        let is_true = if live_diagonals == 4 {
            hostile <= 1
        } else {
            hostile == 0
        };
        if is_true {
            count += 1;
        }
    }
    count
}

/// The 1-2 points of the enclosed region's corners: offsets (0,1) and (1,0)
/// from each corner of the bounding box of non-immortal cells.
fn one_two_points(board: &Board) -> Vec<Point> {
    let mut min_x = u8::MAX;
    let mut min_y = u8::MAX;
    let mut max_x = 0u8;
    let mut max_y = 0u8;
    let mut seen = false;
    for p in board.points() {
        if !board.is_immortal(p) {
            seen = true;
            min_x = min_x.min(p.x);
            min_y = min_y.min(p.y);
            max_x = max_x.max(p.x);
            max_y = max_y.max(p.y);
        }
    }
    if !seen {
        return Vec::new();
    }
    let corners = [
        (min_x, min_y, 1i16, 1i16),
        (max_x, min_y, -1, 1),
        (min_x, max_y, 1, -1),
        (max_x, max_y, -1, -1),
    ];
    let mut out = Vec::new();
    for (cx, cy, dx, dy) in corners {
        for (ox, oy) in [(0i16, 1i16), (1, 0)] {
            let x = cx as i16 + dx * ox;
            let y = cy as i16 + dy * oy;
            if x < 0 || y < 0 {
                continue;
            }
            let p = Point::new(x as u8, y as u8);
            if board.in_bounds(p) && !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}
