//! Seeded random streams.
//!
//! Every sample draws from its own ChaCha8 stream whose seed is a
//! SplitMix64 mix of the master seed and the sample index, so a sample's
//! data does not depend on which worker generated it or in what order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed for sample `index` of a run with `master` seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform and normal draws from one seeded stream.
#[derive(Debug, Clone)]
pub struct SampleRng {
    inner: ChaCha8Rng,
    spare: Option<f64>,
}

impl SampleRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Standard normal by the Box-Muller transform.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    /// `k` distinct indices from `0..n`, uniformly without replacement.
    pub fn subset(&mut self, n: usize, k: usize) -> Vec<usize> {
        rand::seq::index::sample(&mut self.inner, n, k).into_vec()
    }
}
