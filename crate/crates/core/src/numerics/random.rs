//! Counter-addressed random streams.
//!
//! A [`RandomStream`] is a pure function of `(seed, counter)`: the seed keys a
//! ChaCha8 generator, the low 64 bits of the counter select the ChaCha stream
//! and the high 64 bits select a 2^32-word block inside it. Two streams with
//! different counters never share output as long as each draws fewer than
//! 2^31 values and the high counter halves stay below 2^36.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomStream {
    pub seed: u64,
    pub counter: u128,
}

const SCALE: f64 = 1.0 / (1u64 << 53) as f64;

impl RandomStream {
    pub fn new(seed: u64, counter: u128) -> Self {
        Self { seed, counter }
    }

    fn generator(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.counter as u64);
        rng.set_word_pos((self.counter >> 64) << 32);
        rng
    }

    /// Fills `out` with uniform draws in `[0, 1)` (53-bit resolution).
    pub fn fill_uniform(&self, out: &mut [f64]) {
        let mut rng = self.generator();
        for slot in out {
            *slot = (rng.next_u64() >> 11) as f64 * SCALE;
        }
    }

    /// `n` uniform draws in `[0, 1)`.
    pub fn random_uniform(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        self.fill_uniform(&mut out);
        out
    }
}
