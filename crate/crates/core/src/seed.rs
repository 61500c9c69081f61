//! Counter-based seed splitting: trial `i` of an experiment seeded with
//! `base` draws from stream `i` of a ChaCha8 generator keyed by `base`, so
//! results never depend on scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn trial_rng(base: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(trial);
    rng
}

pub fn trial_seed(base: u64, trial: u64) -> u64 {
    trial_rng(base, trial).next_u64()
}
