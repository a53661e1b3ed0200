//! Portable seeded generator.
//!
//! Every random choice in the crate goes through [`Prng`], which is
//! xoshiro256++ seeded from a single `u64` through SplitMix64 (the
//! `seed_from_u64` expansion of `rand_xoshiro`). Parallel workers use
//! [`Prng::stream`]: stream `j` is the base generator advanced by `j` calls of
//! the xoshiro256 `jump` function (2^128 steps each), so streams never overlap
//! and depend only on `(seed, j)`.
//!
//! Derived draws are defined here rather than borrowed from `rand` so that
//! their bit-level behaviour is pinned:
//! - `unit`: top 53 bits of the next output, times 2^-53;
//! - `bernoulli(p)`: `unit() < p`;
//! - `below(n)`: Lemire's multiply-shift with rejection.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

#[derive(Clone, Debug)]
pub struct Prng(Xoshiro256PlusPlus);

impl Prng {
    pub fn new(seed: u64) -> Prng {
        Prng(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    pub fn stream(seed: u64, index: u64) -> Prng {
        let mut g = Prng::new(seed);
        for _ in 0..index {
            g.jump();
        }
        g
    }

    /// Advances by 2^128 steps; `stream(seed, j)` is `new(seed)` after `j` jumps.
    pub fn jump(&mut self) {
        self.0.jump();
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of precision.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Uniform on `0..n`. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Uniform on `lo..=hi`.
    pub fn range_inclusive(&mut self, lo: u64, hi: u64) -> u64 {
        debug_assert!(lo <= hi);
        lo + self.below(hi - lo + 1)
    }

    /// Uniform random `size`-subset of `items`, by partial Fisher–Yates.
    pub fn sample<T: Copy>(&mut self, items: &[T], size: usize) -> Vec<T> {
        let mut pool = items.to_vec();
        let size = size.min(pool.len());
        for i in 0..size {
            let j = i + self.below((pool.len() - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(size);
        pool
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_seed_is_reproducible() {
        let a: Vec<u64> = {
            let mut g = Prng::new(42);
            (0..8).map(|_| g.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut g = Prng::new(42);
            (0..8).map(|_| g.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, {
            let mut g = Prng::new(43);
            (0..8).map(|_| g.next_u64()).collect::<Vec<_>>()
        });
    }

    #[test]
    fn stream_zero_is_base_and_streams_differ() {
        let mut base = Prng::new(7);
        let mut s0 = Prng::stream(7, 0);
        assert_eq!(base.next_u64(), s0.next_u64());
        let mut s1 = Prng::stream(7, 1);
        let mut s2 = Prng::stream(7, 2);
        assert_ne!(s1.next_u64(), s2.next_u64());
    }

    #[test]
    fn below_stays_in_range_and_hits_everything() {
        let mut g = Prng::new(1);
        let mut seen = [false; 7];
        for _ in 0..1000 {
            let v = g.below(7) as usize;
            seen[v] = true;
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(g.below(1), 0);
    }

    #[test]
    fn unit_and_bernoulli_edges() {
        let mut g = Prng::new(3);
        for _ in 0..1000 {
            let u = g.unit();
            assert!((0.0..1.0).contains(&u));
            assert!(g.bernoulli(1.0));
            assert!(!g.bernoulli(0.0));
        }
    }

    #[test]
    fn sample_is_a_subset() {
        let mut g = Prng::new(9);
        let items: Vec<u32> = (1..=10).collect();
        let s = g.sample(&items, 4);
        assert_eq!(s.len(), 4);
        let mut sorted = s.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 4);
        assert_eq!(g.sample(&items, 20).len(), 10);
    }
}
