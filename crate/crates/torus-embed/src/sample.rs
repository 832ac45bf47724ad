//! Deterministic stratified samplers shared by all numerical checks.
//!
//! Every sample point is a pure function of `(seed, index, budget)`: each
//! axis is stratified into `budget` cells visited through an affine index
//! permutation, with in-cell jitter from a per-sample ChaCha stream. Parallel
//! or reordered evaluation therefore cannot change the sampled set.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::{real, Real};

#[derive(Debug, Clone)]
pub struct Sampler {
    seed: u64,
    n: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Sampler {
    pub fn new(seed: u64, lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        Sampler { seed, n: lo.len(), lo, hi }
    }

    /// Uniform over the symmetric window `[-w, w]^n`.
    pub fn symmetric(seed: u64, n: usize, w: f64) -> Self {
        Self::new(seed, vec![-w; n], vec![w; n])
    }

    /// Uniform over the fundamental domain `[0, 1)^n`.
    pub fn unit(seed: u64, n: usize) -> Self {
        Self::new(seed, vec![0.0; n], vec![1.0; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Largest coordinate magnitude this sampler can produce.
    pub fn half_width(&self) -> f64 {
        self.lo
            .iter()
            .chain(self.hi.iter())
            .fold(0.0f64, |acc, &v| acc.max(v.abs()))
    }

    fn rng_for(&self, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(splitmix64(self.seed ^ splitmix64(index.wrapping_add(1))))
    }

    /// The `index`-th of `budget` stratified points.
    pub fn point<T: Real>(&self, index: u64, budget: u64) -> Vec<T> {
        debug_assert!(index < budget);
        let mut rng = self.rng_for(index);
        let b = budget.max(1);
        (0..self.n)
            .map(|axis| {
                // Affine permutation of stratum indices, distinct per axis.
                let h = splitmix64(self.seed ^ (0xa11c_e000 + axis as u64));
                let mut mult = (h % b).max(1);
                while gcd(mult, b) != 1 {
                    mult = mult % b + 1;
                }
                let offset = splitmix64(h) % b;
                let stratum = (mult.wrapping_mul(index).wrapping_add(offset)) % b;
                let jitter: f64 = rng.gen_range(0.0..1.0);
                let t = (stratum as f64 + jitter) / b as f64;
                real::<T>(self.lo[axis] + (self.hi[axis] - self.lo[axis]) * t)
            })
            .collect()
    }

    pub fn points<T: Real>(&self, budget: u64) -> Vec<Vec<T>> {
        (0..budget).map(|i| self.point(i, budget)).collect()
    }

    /// The `index`-th nonzero integer vector with `|k|_inf <= radius`.
    pub fn lattice_shift(&self, index: u64, radius: i64) -> Vec<i64> {
        let mut rng = self.rng_for(index ^ 0x5eed_517f);
        loop {
            let k: Vec<i64> = (0..self.n).map(|_| rng.gen_range(-radius..=radius)).collect();
            if k.iter().any(|&v| v != 0) {
                return k;
            }
        }
    }
}
