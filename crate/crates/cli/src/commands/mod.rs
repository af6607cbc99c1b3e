pub mod calibrate;
pub mod gen_images;
pub mod learn_state;
pub mod load_distribution;
pub mod selftest;

use photonic_qgan::rng::child_seed;

/// Per-round seeds derived from the base seed.
pub fn round_seeds(base: u64, rounds: usize) -> Vec<u64> {
    (0..rounds).map(|r| child_seed(base, r as u64)).collect()
}
