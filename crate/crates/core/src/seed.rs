//! Seed derivation. Every random stream in a run is a ChaCha8 generator whose
//! seed is derived from one top-level seed and a component tag.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub mod stream {
    pub const INIT: u64 = 1;
    pub const CHAIN: u64 = 2;
    pub const HOLDOUT: u64 = 3;
    pub const SYNTH: u64 = 4;
    pub const REPLICA: u64 = 5;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(seed: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ tag.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn rng(seed: u64, tag: u64) -> Rng {
    Rng::seed_from_u64(derive(seed, tag))
}
