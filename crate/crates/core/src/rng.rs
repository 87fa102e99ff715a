//! Seed handling. Every random choice in the crate flows from an explicit
//! 64-bit seed; child seeds come from [`derive`] so trials can run in any
//! order (or in parallel) and still reproduce bit-for-bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for `index` under `seed`.
pub fn derive(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index.wrapping_mul(GOLDEN).wrapping_add(1)))
}

/// Child seed for a named role, e.g. `derive_tag(seed, "oracle")`.
pub fn derive_tag(seed: u64, tag: &str) -> u64 {
    let h = tag
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    derive(seed, h)
}

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}
