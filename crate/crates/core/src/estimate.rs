//! Monte Carlo estimates and the seeded, block-parallel reduction engine.
//!
//! Every stochastic quantity is computed over fixed-size blocks. Block `b`
//! draws from its own ChaCha stream derived from `(seed, stream, b)`, blocks
//! run in parallel, and results are merged in block order, so estimates are
//! bit-identical for any thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub type Rng = ChaCha8Rng;

/// Default number of draws per block.
pub const DEFAULT_BLOCK: usize = 4096;

/// Relative round-off floor used when an estimator has zero sample variance.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl MCEstimate {
    /// A deterministic value carried in estimate form (zero standard error).
    pub fn exact(value: f64) -> Self {
        MCEstimate { value, std_error: 0.0, n_samples: 0, seed: 0 }
    }

    /// `|value - target| <= k·SE`, with a round-off floor for zero-variance
    /// estimators.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error + ROUNDOFF_FLOOR * target.abs().max(1.0)
    }

    pub fn relative_error(&self, target: f64) -> f64 {
        (self.value - target).abs() / target.abs()
    }

    pub fn scaled(&self, s: f64) -> Self {
        MCEstimate { value: self.value * s, std_error: self.std_error * s.abs(), ..*self }
    }
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG for block `block` of stream `stream` under `seed`.
pub fn block_rng(seed: u64, stream: u64, block: u64) -> Rng {
    let mut rng = Rng::seed_from_u64(mix(seed ^ mix(stream)));
    rng.set_stream(block);
    rng
}

/// Runs `f(rng, count, block_index)` over `ceil(total/block)` blocks in
/// parallel and returns the block results in block order.
pub fn run_blocks<A, F>(total: usize, block: usize, seed: u64, stream: u64, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut Rng, usize, usize) -> A + Sync,
{
    let block = block.max(1);
    let nblocks = total.div_ceil(block);
    (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let count = block.min(total - b * block);
            let mut rng = block_rng(seed, stream, b as u64);
            f(&mut rng, count, b)
        })
        .collect()
}

/// Running first and second moments of a vector observable.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: Vec<f64>,
    /// Row-major co-moment matrix `Σ (x-mean)(x-mean)ᵀ`.
    pub comoment: Vec<f64>,
}

impl Moments {
    pub fn new(k: usize) -> Self {
        Moments { n: 0, mean: vec![0.0; k], comoment: vec![0.0; k * k] }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn push(&mut self, x: &[f64]) {
        let k = self.dim();
        self.n += 1;
        let nf = self.n as f64;
        let delta: Vec<f64> = x.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        for (m, d) in self.mean.iter_mut().zip(&delta) {
            *m += d / nf;
        }
        for i in 0..k {
            let di_new = x[i] - self.mean[i];
            for j in 0..k {
                self.comoment[i * k + j] += delta[j] * di_new;
            }
        }
    }

    /// Chan et al. pairwise merge.
    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other.clone();
            return;
        }
        let k = self.dim();
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let delta: Vec<f64> = other.mean.iter().zip(&self.mean).map(|(b, a)| b - a).collect();
        for i in 0..k {
            for j in 0..k {
                self.comoment[i * k + j] += other.comoment[i * k + j] + delta[i] * delta[j] * na * nb / n;
            }
        }
        for (m, d) in self.mean.iter_mut().zip(&delta) {
            *m += d * nb / n;
        }
        self.n += other.n;
    }

    /// Sample covariance entry `(i, j)` (denominator `n - 1`).
    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.comoment[i * self.dim() + j] / (self.n - 1) as f64
    }

    pub fn estimate(&self, i: usize, seed: u64) -> MCEstimate {
        let var = self.covariance(i, i).max(0.0);
        MCEstimate {
            value: self.mean[i],
            std_error: (var / self.n.max(1) as f64).sqrt(),
            n_samples: self.n,
            seed,
        }
    }

    pub fn estimates(&self, seed: u64) -> Vec<MCEstimate> {
        (0..self.dim()).map(|i| self.estimate(i, seed)).collect()
    }
}

/// Merges per-block moments in order.
pub fn merge_all(parts: impl IntoIterator<Item = Moments>, k: usize) -> Moments {
    let mut acc = Moments::new(k);
    for p in parts {
        acc.merge(&p);
    }
    acc
}
