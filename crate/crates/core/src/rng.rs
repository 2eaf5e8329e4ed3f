//! Seeded RNG construction.
//!
//! All randomness in the crate flows through ChaCha8 generators created
//! here, so a run is a pure function of `(inputs, seed)`. Draws are made in
//! `f64` and converted to the target scalar, keeping the stream identical
//! across scalar widths.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG for a top-level seed.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` under the same seed. Partitioned batch work
/// uses one stream per partition so the partitioning does not change any
/// individual stream.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
