//! Seeded randomness.
//!
//! Every random draw in the crate comes from ChaCha8 seeded with
//! `seed_from_u64`, so results are a pure function of the seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for `(seed, stream)`.
pub fn derived(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
