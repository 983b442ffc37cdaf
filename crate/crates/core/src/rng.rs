//! Portable seeded random numbers.
//!
//! Every random draw in the crate goes through [`SeededRng`], so fixtures
//! reproduce across platforms and across implementations in other
//! languages. The algorithm is fixed:
//!
//! * core stream: ChaCha with 8 rounds, 256-bit key = the seed as
//!   little-endian `u64` followed by 24 zero bytes, stream/nonce 0;
//!   `next_u64` consumes two consecutive 32-bit output words, low word first;
//! * `next_f64`: `(next_u64() >> 11) * 2^-53`, uniform on `[0, 1)`;
//! * `below(n)`: rejection sampling, draw `x = next_u64()` and accept when
//!   `x < 2^64 - (2^64 mod n)`, returning `x mod n`;
//! * `normal()`: Box-Muller cosine branch, `u1 = 1 - next_f64()`,
//!   `u2 = next_f64()`, `sqrt(-2 ln u1) * cos(2 pi u2)`; the sine branch is
//!   discarded so every call consumes exactly two `f64` draws;
//! * `shuffle`: Fisher-Yates from the back, swapping `i` with `below(i + 1)`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        Self {
            inner: ChaCha8Rng::from_seed(key),
        }
    }

    /// Derives an independent stream for a numbered sub-task (scene, image, tile).
    pub fn derive(seed: u64, index: u64) -> Self {
        // splitmix64 finalizer over the pair
        let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Self::new(z ^ (z >> 31))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % n;
            }
        }
    }

    /// Uniform integer in the inclusive range `lo..=hi`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        lo + self.below(span) as i64
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
