//! Shared fixtures for the benchmarks.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Sizes covered by the benchmark groups.
pub const SIZES: [usize; 5] = [64, 256, 1024, 4096, 16384];

/// Deterministic signal of `len` samples in `[-1, 1)`.
pub fn signal(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}
