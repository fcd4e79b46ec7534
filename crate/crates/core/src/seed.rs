//! Deterministic seeding.
//!
//! Every random draw in the crate comes from a ChaCha8 stream seeded with a
//! 64-bit value. Independent streams (one per client, one for the server
//! reserve, ...) are derived from the run seed with the SplitMix64 finalizer,
//! so the whole pipeline is a pure function of the run seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags used when deriving sub-seeds.
pub mod stream {
    pub const PARTITION: u64 = 0x5041_5254;
    pub const CLIENT: u64 = 0x434c_4e54;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent seed for `(tag, index)` from `base`.
pub fn derive(base: u64, tag: u64, index: u64) -> u64 {
    splitmix64(splitmix64(base ^ tag).wrapping_add(index))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
