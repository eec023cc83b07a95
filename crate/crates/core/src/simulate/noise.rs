//! Q-Wiener increments and compound-Poisson arrival counts.
//!
//! Each step consumes exactly `J` normals followed by `M` uniforms, in that
//! order, regardless of the state. Systems driven by the same stream are
//! therefore coupled pathwise, even when their jump intensities differ.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Covariance eigenvalues `Q e_j = lambda_j e_j` of the driving noise and
/// the seed of its realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub q_eigenvalues: Vec<f64>,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(q_eigenvalues: Vec<f64>, seed: u64) -> Result<Self> {
        if let Some(l) = q_eigenvalues.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return Err(Error::Config(format!("Q eigenvalues must be finite and > 0, got {l}")));
        }
        Ok(Self { q_eigenvalues, seed })
    }

    /// `lambda_j = 2^{-j}`, `j = 1..=columns`.
    pub fn geometric(columns: usize, seed: u64) -> Self {
        Self {
            q_eigenvalues: (1..=columns).map(|j| 0.5_f64.powi(j as i32)).collect(),
            seed,
        }
    }

    pub fn columns(&self) -> usize {
        self.q_eigenvalues.len()
    }
}

/// SplitMix64 finalizer; maps `(master, index)` to well-separated seeds.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Smallest `k` with `P(N <= k) > u` for `N ~ Poisson(mean)`.
pub fn poisson_inverse_cdf(u: f64, mean: f64) -> u32 {
    if mean <= 0.0 {
        return 0;
    }
    let mut p = (-mean).exp();
    let mut cdf = p;
    let mut k = 0u32;
    while u >= cdf && k < 10_000 {
        k += 1;
        p *= mean / f64::from(k);
        cdf += p;
        if p == 0.0 {
            break;
        }
    }
    k
}

/// Per-step noise source for one path.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
    sqrt_q: Vec<f64>,
}

/// One step of driving noise.
#[derive(Debug, Clone, Default)]
pub struct StepNoise {
    /// Wiener increments `sqrt(lambda_j dt) xi_j`.
    pub dw: Vec<f64>,
    /// Uniforms from which arrival counts are read off per system.
    pub uniforms: Vec<f64>,
}

impl NoiseStream {
    pub fn new(spec: &NoiseSpec, seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            sqrt_q: spec.q_eigenvalues.iter().map(|l| l.sqrt()).collect(),
        }
    }

    pub fn next_step(&mut self, dt: f64, atoms: usize, out: &mut StepNoise) {
        let sdt = dt.sqrt();
        out.dw.clear();
        for &s in &self.sqrt_q {
            let xi: f64 = self.rng.sample(StandardNormal);
            out.dw.push(s * sdt * xi);
        }
        out.uniforms.clear();
        for _ in 0..atoms {
            out.uniforms.push(self.rng.random::<f64>());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_inverse_cdf_small_mean() {
        let m = 0.2_f64;
        let p0 = (-m).exp();
        assert_eq!(poisson_inverse_cdf(0.0, m), 0);
        assert_eq!(poisson_inverse_cdf(p0 - 1e-12, m), 0);
        assert_eq!(poisson_inverse_cdf(p0 + 1e-12, m), 1);
        assert_eq!(poisson_inverse_cdf(0.5, 0.0), 0);
    }

    #[test]
    fn poisson_counts_have_right_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mean = 0.7;
        let n = 200_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| f64::from(poisson_inverse_cdf(rng.random(), mean)))
            .collect();
        let avg = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - avg).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((avg - mean).abs() < 4.0 * (mean / n as f64).sqrt());
        assert!((var - mean).abs() < 0.02);
    }

    #[test]
    fn derived_seeds_differ() {
        let a: Vec<u64> = (0..1000).map(|i| derive_seed(7, i)).collect();
        let mut b = a.clone();
        b.sort_unstable();
        b.dedup();
        assert_eq!(a.len(), b.len());
        assert_ne!(derive_seed(7, 0), derive_seed(8, 0));
    }

    #[test]
    fn rejects_bad_eigenvalues() {
        assert!(NoiseSpec::new(vec![1.0, 0.0], 0).is_err());
        assert_eq!(NoiseSpec::geometric(3, 0).q_eigenvalues, vec![0.5, 0.25, 0.125]);
    }
}
