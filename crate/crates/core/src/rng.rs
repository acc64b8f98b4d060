//! Seedable random streams.
//!
//! Each stream is a ChaCha8 keystream keyed by the experiment seed, with the
//! replica index selecting the 64-bit stream id. Replica `r` therefore sees
//! the same numbers regardless of how many other replicas run or in which
//! order.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circle::wrap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, substream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(substream);
        RandomStream { rng }
    }

    /// Uniform edge index in `0..edge_count`.
    #[inline]
    pub fn edge(&mut self, edge_count: usize) -> usize {
        self.rng.random_range(0..edge_count)
    }

    #[inline]
    pub fn fair_bit(&mut self) -> bool {
        self.rng.random::<bool>()
    }

    /// Uniform angle in `[-pi, pi)`.
    pub fn uniform_angle(&mut self) -> f64 {
        wrap(-PI + 2.0 * PI * self.rng.random::<f64>())
    }

    /// Uniform real in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    /// Underlying generator, for use with `rand` adapters.
    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Number of 32-bit words consumed so far.
    pub fn word_position(&self) -> u128 {
        self.rng.get_word_pos()
    }
}
