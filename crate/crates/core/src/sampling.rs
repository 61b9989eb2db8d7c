//! Sampling distributions over components, mini-batch draws and random
//! inner-loop lengths.
//!
//! Mini-batches are drawn i.i.d. **with** replacement, matching the
//! estimator analysis. Draws go through a Vose alias table so both uniform
//! and importance schemes share one O(1) code path.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::SmoothnessProfile;

/// How the per-component sampling probabilities are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// `q_i = 1/n`; `L_Omega = max_i L_i`.
    Uniform,
    /// `q_i = L_i / sum_j L_j`; `L_Omega = (1/n) sum_j L_j`.
    Importance,
}

/// Probability vector `Q` over `{0..n-1}` plus the induced smoothness
/// constant `L_Omega = max_i L_i / (n q_i)`.
#[derive(Debug, Clone)]
pub struct SamplingDistribution {
    q: Vec<f64>,
    l_omega: f64,
    scheme: Scheme,
    alias: AliasTable,
}

impl SamplingDistribution {
    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn l_omega(&self) -> f64 {
        self.l_omega
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// One draw from `Q`.
    pub fn sample(&self, rng: &mut RngStream) -> usize {
        self.alias.sample(rng)
    }
}

/// Builds the sampling distribution for a smoothness profile.
pub fn build_distribution(profile: &SmoothnessProfile, scheme: Scheme) -> SamplingDistribution {
    let n = profile.n();
    let q: Vec<f64> = match scheme {
        Scheme::Uniform => alloc::vec![1.0 / n as f64; n],
        Scheme::Importance => {
            let total: f64 = profile.per_component().iter().sum();
            profile.per_component().iter().map(|l| l / total).collect()
        }
    };
    let l_omega = match scheme {
        Scheme::Uniform => profile.max(),
        Scheme::Importance => profile.mean(),
    };
    let alias = AliasTable::new(&q);
    SamplingDistribution {
        q,
        l_omega,
        scheme,
        alias,
    }
}

/// `b` i.i.d. draws (with replacement) from the distribution.
pub fn sample_minibatch(dist: &SamplingDistribution, b: usize, rng: &mut RngStream) -> Vec<usize> {
    debug_assert!(b >= 1 && b <= dist.n());
    (0..b).map(|_| dist.sample(rng)).collect()
}

/// Uniform draw of the inner-loop length from `{1, ..., m}`.
pub fn sample_inner_length(m: usize, rng: &mut RngStream) -> usize {
    debug_assert!(m >= 1);
    rng.index(m) + 1
}

/// Vose alias table for O(1) sampling from a discrete distribution.
#[derive(Debug, Clone)]
struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<usize>,
}

impl AliasTable {
    fn new(q: &[f64]) -> Self {
        let n = q.len();
        assert!(n >= 1, "empty distribution");
        let total: f64 = q.iter().sum();
        assert!(
            q.iter().all(|&p| p > 0.0) && (total - 1.0).abs() <= 1e-12,
            "q must be positive and sum to 1"
        );
        let mut scaled: Vec<f64> = q.iter().map(|p| p * n as f64).collect();
        let mut small: Vec<usize> = Vec::new();
        let mut large: Vec<usize> = Vec::new();
        for (i, &p) in scaled.iter().enumerate() {
            if p < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        let mut prob = alloc::vec![1.0; n];
        let mut alias: Vec<usize> = (0..n).collect();
        while let (Some(l), Some(g)) = (small.pop(), large.pop()) {
            prob[l] = scaled[l];
            alias[l] = g;
            scaled[g] = (scaled[g] + scaled[l]) - 1.0;
            if scaled[g] < 1.0 {
                small.push(g);
            } else {
                large.push(g);
            }
        }
        // Leftovers are 1.0 up to rounding.
        for i in large.into_iter().chain(small) {
            prob[i] = 1.0;
        }
        AliasTable { prob, alias }
    }

    fn sample(&self, rng: &mut RngStream) -> usize {
        let i = rng.index(self.prob.len());
        if rng.u01() < self.prob[i] {
            i
        } else {
            self.alias[i]
        }
    }
}

/// Seeded deterministic pseudo-random stream. The same seed produces the
/// same draw sequence on every platform.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
    seed: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream for run `run_index`. Splitting rule:
    /// `child_seed = splitmix64(parent_seed ^ splitmix64(run_index))`.
    pub fn child(&self, run_index: u64) -> RngStream {
        RngStream::new(splitmix64(self.seed ^ splitmix64(run_index)))
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// Uniform f64 in `[0, 1)`.
    pub fn u01(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Standard normal via Box-Muller (used by test-instance generators).
    pub fn normal(&mut self) -> f64 {
        let u1 = (1.0 - self.u01()).max(f64::MIN_POSITIVE);
        let u2 = self.u01();
        (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
    }
}
