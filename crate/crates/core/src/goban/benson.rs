//! Static life detection: the fixed-point elimination over chains and
//! enclosed regions that identifies pass-alive chains.
//!
//! A region is a maximal connected component of points not holding a stone
//! of the candidate color. A region is vital to a chain when every empty
//! point of the region is a liberty of that chain. Chains keep needing two
//! vital regions; regions die when any bordering chain is eliminated.
//! Immortal chains are uncapturable by construction, so they are permanent
//! members of the alive set and may anchor regions for mortal chains.
//!
//! This runs at every search node, so everything lives in fixed-size stack
//! buffers: point sets are `u128` masks, chain/region sets likewise.

use super::{Board, CellSet, Chain, Color, Point};

const MAX_CELLS: usize = 81;

struct Labeling {
    chain_id: [u8; MAX_CELLS],
    chain_libs: [u128; MAX_CELLS],
    chain_immortal: u128,
    chain_count: usize,
}

fn label_chains(board: &Board, color: Color) -> Labeling {
    let n = board.width() as usize * board.height() as usize;
    let mut chain_id = [u8::MAX; MAX_CELLS];
    let mut chain_libs = [0u128; MAX_CELLS];
    let mut chain_immortal = 0u128;
    let mut chain_count = 0usize;
    let mut stack = [0u8; MAX_CELLS];
    for start in 0..n {
        if chain_id[start] != u8::MAX || board.cell(index_point(board, start)) != Some(color) {
            continue;
        }
        let id = chain_count as u8;
        chain_count += 1;
        let mut top = 0;
        stack[top] = start as u8;
        top += 1;
        chain_id[start] = id;
        while top > 0 {
            top -= 1;
            let i = stack[top] as usize;
            if board.is_immortal(index_point(board, i)) {
                chain_immortal |= 1u128 << id;
            }
            for ni in board.neighbor_indices(i) {
                match board.cell(index_point(board, ni)) {
                    None => chain_libs[id as usize] |= 1u128 << ni,
                    Some(c) if c == color && chain_id[ni] == u8::MAX => {
                        chain_id[ni] = id;
                        stack[top] = ni as u8;
                        top += 1;
                    }
                    _ => {}
                }
            }
        }
    }
    Labeling {
        chain_id,
        chain_libs,
        chain_immortal,
        chain_count,
    }
}

/// Alive-chain mask for `color` under the fixed-point elimination.
fn solve(board: &Board, color: Color, labels: &Labeling) -> u128 {
    let n = board.width() as usize * board.height() as usize;

    // Regions: components of cells not holding `color`.
    let mut region_id = [u8::MAX; MAX_CELLS];
    let mut region_empties = [0u128; MAX_CELLS];
    let mut region_adjacent = [0u128; MAX_CELLS]; // chain-id mask
    let mut region_count = 0usize;
    let mut stack = [0u8; MAX_CELLS];
    for start in 0..n {
        if region_id[start] != u8::MAX
            || board.cell(index_point(board, start)) == Some(color)
        {
            continue;
        }
        let id = region_count as u8;
        region_count += 1;
        let mut top = 0;
        stack[top] = start as u8;
        top += 1;
        region_id[start] = id;
        while top > 0 {
            top -= 1;
            let i = stack[top] as usize;
            if board.cell(index_point(board, i)).is_none() {
                region_empties[id as usize] |= 1u128 << i;
            }
            for ni in board.neighbor_indices(i) {
                if board.cell(index_point(board, ni)) == Some(color) {
                    region_adjacent[id as usize] |= 1u128 << labels.chain_id[ni];
                } else if region_id[ni] == u8::MAX {
                    region_id[ni] = id;
                    stack[top] = ni as u8;
                    top += 1;
                }
            }
        }
    }

    // vital[c]: mask of regions whose empties are all liberties of chain c.
    let mut vital = [0u128; MAX_CELLS];
    for r in 0..region_count {
        let mut adj = region_adjacent[r];
        while adj != 0 {
            let c = adj.trailing_zeros() as usize;
            adj &= adj - 1;
            if region_empties[r] & !labels.chain_libs[c] == 0 {
                vital[c] |= 1u128 << r;
            }
        }
    }

    let mut chain_alive = if labels.chain_count == 128 {
        u128::MAX
    } else {
        (1u128 << labels.chain_count) - 1
    };
    let mut region_alive = if region_count == 128 {
        u128::MAX
    } else {
        (1u128 << region_count) - 1
    };
    loop {
        let mut changed = false;
        for c in 0..labels.chain_count {
            let bit = 1u128 << c;
            if chain_alive & bit == 0 || labels.chain_immortal & bit != 0 {
                continue;
            }
            if (vital[c] & region_alive).count_ones() < 2 {
                chain_alive &= !bit;
                changed = true;
            }
        }
        for r in 0..region_count {
            let bit = 1u128 << r;
            if region_alive & bit != 0 && region_adjacent[r] & !chain_alive != 0 {
                region_alive &= !bit;
                changed = true;
            }
        }
        if !changed {
            return chain_alive;
        }
    }
}

pub(super) fn is_unconditionally_alive(board: &Board, p: Point) -> bool {
    let Some(color) = board.cell(p) else {
        return false;
    };
    // Cheap pre-filter: flood just the target chain. Pass-alive mortal
    // chains need two vital regions, hence at least two liberties.
    let start = cell_index(board, p);
    let mut visited = CellSet::new();
    visited.insert(start);
    let mut stack = [0u8; MAX_CELLS];
    stack[0] = start as u8;
    let mut top = 1;
    let mut libs = CellSet::new();
    while top > 0 {
        top -= 1;
        let i = stack[top] as usize;
        if board.is_immortal(index_point(board, i)) {
            return true;
        }
        for ni in board.neighbor_indices(i) {
            match board.cell(index_point(board, ni)) {
                None => libs.insert(ni),
                Some(c) if c == color && !visited.contains(ni) => {
                    visited.insert(ni);
                    stack[top] = ni as u8;
                    top += 1;
                }
                _ => {}
            }
        }
    }
    if libs.0.count_ones() < 2 {
        return false;
    }

    let labels = label_chains(board, color);
    let target = labels.chain_id[start] as usize;
    solve(board, color, &labels) & (1u128 << target) != 0
}

pub(super) fn unconditionally_alive(board: &Board, color: Color) -> Vec<Chain> {
    let labels = label_chains(board, color);
    if labels.chain_count == 0 {
        return Vec::new();
    }
    let alive = solve(board, color, &labels);
    let mut out = Vec::new();
    let mut seen = CellSet::new();
    for i in 0..(board.width() as usize * board.height() as usize) {
        let id = labels.chain_id[i];
        if id == u8::MAX || seen.contains(i) || alive & (1u128 << id) == 0 {
            continue;
        }
        let chain = board
            .chain_at(index_point(board, i))
            .expect("labeled cell holds a stone");
        for &q in &chain.points {
            seen.insert(cell_index(board, q));
        }
        out.push(chain);
    }
    out
}

fn cell_index(board: &Board, p: Point) -> usize {
    p.y as usize * board.width() as usize + p.x as usize
}

fn index_point(board: &Board, i: usize) -> Point {
    Point::new(
        (i % board.width() as usize) as u8,
        (i / board.width() as usize) as u8,
    )
}
