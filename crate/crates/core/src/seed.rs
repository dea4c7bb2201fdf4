//! Seed derivation.
//!
//! Every random stream in the crate comes from one user seed. Sub-streams are
//! derived with a splitmix64 finalizer applied to `seed ^ (GOLDEN * (stream + 1))`,
//! so the value for a stream depends only on the seed and its index, never on
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 output mix.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed of sub-stream `stream` from `seed`.
pub fn derive(seed: u64, stream: u64) -> u64 {
    mix64(seed ^ GOLDEN.wrapping_mul(stream.wrapping_add(1)))
}

/// A ChaCha8 generator for sub-stream `stream` of `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, stream))
}
