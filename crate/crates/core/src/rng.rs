//! Seeded random streams.
//!
//! Every trial draws from its own ChaCha8 stream, selected by
//! `(size index, grid index, trial)`, so results do not depend on how
//! trials are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream for one trial. `size_idx` and `p_idx` must fit in 16 bits and
/// `trial` in 32 bits.
pub fn trial_rng(seed: u64, size_idx: usize, p_idx: usize, trial: usize) -> ChaCha8Rng {
    assert!(size_idx < 1 << 16 && p_idx < 1 << 16 && trial < 1 << 32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((size_idx as u64) << 48) | ((p_idx as u64) << 32) | trial as u64);
    rng
}
