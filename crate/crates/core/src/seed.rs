//! Deterministic seed derivation.
//!
//! Every task (sweep cell replicate, null-model shuffle) gets its own
//! generator seeded from a pure function of its coordinates, so results do
//! not depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a base seed with a tuple of indices into a new 64-bit seed.
///
/// `mix(base, &[a, b, c])` folds each index in with SplitMix64:
/// `h = splitmix64(base); h = splitmix64(h ^ a); ...`.
pub fn mix(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(base), |h, &p| splitmix64(h ^ p))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
