//! Seeded, splittable random streams.
//!
//! Every stochastic run in this crate draws from a [`ChaCha8Rng`] derived
//! from a 64-bit master seed and a stream index. Streams with the same seed
//! and different indices are statistically independent, so trials can be
//! fanned out across threads and still reproduce bit-identically regardless
//! of scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type EngineRng = ChaCha8Rng;

/// Derive the RNG for one stream (e.g. one trial) of a seeded experiment.
pub fn stream_rng(master_seed: u64, stream: u64) -> EngineRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}
