//! Counter-style random streams keyed by `(seed, domain, index)`.
//!
//! Every grid point (or time sample) owns an independent ChaCha stream, so a
//! record depends only on the seed and the point index, never on the order in
//! which points are visited or on how many threads visit them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Domain tag for per-point sampling in a single irreducible block, combined
/// with `2j` so that distinct blocks never share a stream.
pub fn block_domain(two_j: i32) -> u64 {
    0x5350_494e_0000_0000 ^ (two_j as u32 as u64)
}

/// Domain tag for the photon-sum (block membership) draw of two-mode records.
pub const THINNING_DOMAIN: u64 = 0x5448_494e_4e49_4e47;

/// Domain tag for Jaynes-Cummings readout shots.
pub const READOUT_DOMAIN: u64 = 0x4a43_5245_4144_4f55;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let key = splitmix64(splitmix64(seed) ^ domain);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}
