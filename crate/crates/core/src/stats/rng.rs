//! Seeded random streams.
//!
//! Every stream is ChaCha8 (`rand_chacha::ChaCha8Rng`) keyed by
//! `seed_from_u64(master_seed)` with a 64-bit stream id selecting an
//! independent substream. Normals use the ziggurat sampler of
//! `rand_distr::StandardNormal`. Fixing the master seed and stream id fixes
//! every draw, independent of thread scheduling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct McRng {
    inner: ChaCha8Rng,
}

impl McRng {
    /// Stream 0 of `seed`.
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    pub fn substream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    /// Substream keyed by a label, e.g. a SNP identifier, so the draws do
    /// not depend on where the label sits in a list.
    pub fn keyed(seed: u64, label: &str) -> Self {
        Self::substream(seed, stable_hash(label))
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    #[inline]
    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn normal_with(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.normal()
    }

    /// Binomial(n, p) by summing Bernoulli trials; meant for small `n`.
    pub fn binomial(&mut self, n: u32, p: f64) -> u32 {
        (0..n).filter(|_| self.uniform() < p).count() as u32
    }

    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// `k` distinct indices from `0..n`, in increasing order.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut idx = rand::seq::index::sample(&mut self.inner, n, k.min(n)).into_vec();
        idx.sort_unstable();
        idx
    }
}

/// FNV-1a, 64 bit. Stable across platforms and releases.
pub fn stable_hash(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = McRng::new(42);
        let mut b = McRng::new(42);
        for _ in 0..1_000_000 {
            assert_eq!(a.next_u32(), b.next_u32());
        }
    }

    #[test]
    fn substreams_differ() {
        let mut a = McRng::substream(42, 0);
        let mut b = McRng::substream(42, 1);
        let da: Vec<u32> = (0..8).map(|_| a.next_u32()).collect();
        let db: Vec<u32> = (0..8).map(|_| b.next_u32()).collect();
        assert_ne!(da, db);
    }

    #[test]
    fn uniform_mean_within_clt_bound() {
        let n = 1_000_000;
        let mut r = McRng::new(7);
        let mean = (0..n).map(|_| r.uniform()).sum::<f64>() / n as f64;
        // sd of the mean is sqrt(1/12 / n)
        let bound = 3.0 * (1.0 / 12.0 / n as f64).sqrt();
        assert!((mean - 0.5).abs() < bound, "{mean}");
    }

    #[test]
    fn normal_variance_within_clt_bound() {
        let n = 1_000_000;
        let mut r = McRng::new(11);
        let xs: Vec<f64> = (0..n).map(|_| r.normal()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // var of the sample variance of N(0,1) is 2/(n-1)
        let bound = 3.0 * (2.0 / (n - 1) as f64).sqrt();
        assert!((var - 1.0).abs() < bound, "{var}");
    }

    #[test]
    fn binomial_mean() {
        let mut r = McRng::new(3);
        let n = 200_000;
        let mean = (0..n).map(|_| r.binomial(2, 0.3) as f64).sum::<f64>() / n as f64;
        assert!((mean - 0.6).abs() < 3.0 * (2.0 * 0.3 * 0.7 / n as f64).sqrt());
    }

    #[test]
    fn sampled_indices_are_distinct() {
        let mut r = McRng::new(5);
        let idx = r.sample_indices(100, 10);
        assert_eq!(idx.len(), 10);
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(stable_hash(""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(stable_hash("a"), 0xaf63_dc4c_8601_ec8c);
    }
}
