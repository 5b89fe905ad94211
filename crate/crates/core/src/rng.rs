//! Seeded random streams.
//!
//! Every random draw in the crate comes from ChaCha8 (the `rand_chacha`
//! implementation) keyed by a single 64-bit seed through
//! `SeedableRng::seed_from_u64`. Independent consumers get their own ChaCha
//! stream id, so a forest tree or a CV repeat sees the same numbers no matter
//! how work is scheduled.
//!
//! Conversions from raw 64-bit words are fixed here rather than delegated to
//! `rand` so that the sequence of derived values is fully specified:
//!
//! - uniform `[0, 1)`: top 53 bits times 2⁻⁵³;
//! - index below `n`: `⌊u · n⌋` with `u` the uniform above;
//! - standard normal: Box–Muller on two uniforms, cosine branch only.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Stream-id domains. The high 32 bits of a stream id name the consumer,
/// the low 32 bits index within it.
pub mod domain {
    pub const IMAGE_NOISE: u64 = 1;
    pub const FOREST_TREE: u64 = 2;
    pub const CV_REPEAT: u64 = 3;
    pub const TRACE_SYNTH: u64 = 4;
    pub const SCENE_SYNTH: u64 = 5;
    pub const TEST_DATA: u64 = 6;
}

#[derive(Debug, Clone)]
pub struct SeedStream {
    inner: ChaCha8Rng,
}

impl SeedStream {
    pub fn new(seed: u64, domain: u64, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream((domain << 32) | (index & 0xffff_ffff));
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform index in `0..n`. Panics if `n == 0`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index range must be non-empty");
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int_inclusive(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        lo + self.index((hi - lo + 1) as usize) as i64
    }

    pub fn standard_normal(&mut self) -> f64 {
        // 1 - u keeps the log argument in (0, 1].
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn normal(&mut self, mean: f64, sigma: f64) -> f64 {
        mean + sigma * self.standard_normal()
    }

    /// Fisher–Yates, walking from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }

    /// `k` distinct indices from `0..n`, in draw order.
    pub fn sample_without_replacement(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.index(n - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}
