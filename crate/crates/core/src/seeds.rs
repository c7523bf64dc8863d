//! Every run is driven by one named root seed; independent rng streams are
//! derived per purpose so adding draws to one consumer never shifts another.

/// Stream id for problem generation attempts (offset by attempt index).
pub const CORPUS: u64 = 0x01;
/// Stream id for the genetic algorithm (population init, selection,
/// crossover, mutation).
pub const GA: u64 = 0x02;

/// Derive an independent stream seed from the root seed.
pub fn derive(root: u64, stream: u64) -> u64 {
    let mut z = root ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
