//! Seed derivation. Every random object is drawn from ChaCha8 seeded by
//! `derive_seed(master, stream)`; stream numbers are fixed per use site.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const PRNG_NAME: &str = "chacha8-v1";

/// SplitMix64 finalizer over (master, stream); stable across releases.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng(master: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stream))
}

pub mod streams {
    pub const RANDOM_SET: u64 = 1;
    pub const GNP: u64 = 2;
    pub const DUAL_SHIFT: u64 = 3;
    pub const KERNEL: u64 = 4;
    pub const SYSTEM: u64 = 5;
    pub const COLOURING: u64 = 6;
}
