//! Random-table position hashing, seeded from a fixed constant so hashes
//! (and everything derived from them: corpora, leaf counts) are identical
//! across runs and machines.

use std::sync::OnceLock;

use super::MAX_BOARD_DIM;

const TABLE_SEED: u64 = 0x7473_756d_655f_6762;

pub(super) struct Tables {
    pub stones: [[u64; (MAX_BOARD_DIM as usize) * (MAX_BOARD_DIM as usize)]; 2],
    pub white_to_move: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(super) fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut state = TABLE_SEED;
        let mut stones = [[0u64; 81]; 2];
        for side in &mut stones {
            for key in side.iter_mut() {
                *key = splitmix64(&mut state);
            }
        }
        Tables {
            stones,
            white_to_move: splitmix64(&mut state),
        }
    })
}
