//! Deterministic RNG streams.
//!
//! Everything stochastic in the pipeline draws from a ChaCha8 generator
//! seeded from the run seed. Independent units of work (batch items,
//! retry attempts) get their own stream id, so parallelizable work stays
//! reproducible regardless of scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Root generator for a run.
pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream derived from `(seed, stream)`.
///
/// Streams with the same seed never overlap, so per-item generators can be
/// created in any order.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
