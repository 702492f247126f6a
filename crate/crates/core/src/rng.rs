//! Seedable, splittable random stream shared by every stochastic routine.
//!
//! The generator is ChaCha20. All derived quantities (uniform reals, bounded
//! integers, shuffles) are computed here from raw `u64` draws with fixed
//! bit-level recipes, so a given seed yields the same sequence on every
//! platform and pointer width.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

pub const ALGORITHM: &str = "chacha20";

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn algorithm(&self) -> &'static str {
        ALGORITHM
    }

    /// Independent child stream number `index`.
    ///
    /// Children depend only on the parent's seed, stream id and `index`, not
    /// on how much of the parent has been consumed.
    pub fn child(&self, index: u64) -> RngStream {
        let mixed = splitmix64(self.seed ^ splitmix64(self.stream.wrapping_add(0x9e37_79b9)));
        RngStream::with_stream(mixed, index.wrapping_add(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n` by rejection (no modulo bias). `n` must be > 0.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "RngStream::below requires n > 0");
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return (v % n) as usize;
            }
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Standard normal draw (Box-Muller, one value per call).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        crate::numeric::sqrt(-2.0 * crate::numeric::ln(u1))
            * libm::cos(2.0 * core::f64::consts::PI * u2)
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RngStream::new(42);
        let mut b = RngStream::new(42);
        let xa: Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        assert_eq!(xa, xb);
    }

    #[test]
    fn frozen_first_draws() {
        // Pinned so that a dependency bump changing the stream is noticed.
        let mut a = RngStream::new(42);
        let first = a.next_u64();
        assert_eq!(first, 9_482_535_800_248_027_256);
        let mut again = RngStream::new(42);
        assert_eq!(first, again.next_u64());
        assert_ne!(first, RngStream::new(43).next_u64());
    }

    #[test]
    fn children_are_independent_of_parent_consumption() {
        let parent = RngStream::new(7);
        let mut used = parent.clone();
        for _ in 0..10 {
            used.next_u64();
        }
        assert_eq!(parent.child(3).next_u64(), used.child(3).next_u64());
        assert_ne!(parent.child(3).next_u64(), parent.child(4).next_u64());
        assert_ne!(parent.child(0).next_u64(), parent.clone().next_u64());
    }

    #[test]
    fn grandchildren_differ_from_children() {
        let p = RngStream::new(1);
        assert_ne!(p.child(1).child(1).next_u64(), p.child(1).next_u64());
    }

    #[test]
    fn below_and_uniform_ranges() {
        let mut r = RngStream::new(9);
        for _ in 0..1000 {
            assert!(r.below(7) < 7);
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }
}
