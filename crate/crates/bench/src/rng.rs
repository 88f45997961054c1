//! Seeded random streams.
//!
//! Every generator is ChaCha20 keyed by the 64-bit run seed (expanded with
//! `seed_from_u64`); independent substreams select the ChaCha stream id.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Trials per sample size addressable by [`trial_rng`].
pub const MAX_TRIALS: u64 = 1 << 24;

/// The stream for `trial` at the `size_index`-th sample size of a run.
pub fn trial_rng(seed: u64, size_index: usize, trial: usize) -> ChaCha20Rng {
    debug_assert!((trial as u64) < MAX_TRIALS);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(((size_index as u64 + 1) << 24) | trial as u64);
    rng
}

/// The stream used for bootstrap resampling of the `size_index`-th summary.
pub fn bootstrap_rng(seed: u64, size_index: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(size_index as u64 + 1);
    rng
}
