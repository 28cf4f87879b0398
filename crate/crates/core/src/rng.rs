//! Seedable random stream used by every sampler.
//!
//! The generator is ChaCha8 from `rand_chacha` 0.9, seeded through
//! `SeedableRng::seed_from_u64`. Uniforms are rand's 53-bit `[0, 1)` doubles
//! and exponentials use the inverse CDF `-ln(1 - U) / rate`. Changing any of
//! these changes every sample golden, so [`GENERATOR_ID`] names them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GENERATOR_ID: &str = "chacha8/rand_chacha-0.9/inverse-cdf-exp/v1";

#[derive(Debug, Clone)]
pub struct GrdRng {
    inner: ChaCha8Rng,
}

impl GrdRng {
    pub fn seed_from_u64(seed: u64) -> Self {
        GrdRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Exp(rate) by inversion.
    pub fn exponential(&mut self, rate: f64) -> f64 {
        -(1.0 - self.uniform()).ln() / rate
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = GrdRng::seed_from_u64(42);
        let mut b = GrdRng::seed_from_u64(42);
        for _ in 0..100 {
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        }
        let mut c = GrdRng::seed_from_u64(43);
        assert_ne!(a.uniform(), c.uniform());
    }

    #[test]
    fn exponential_is_finite_and_has_right_mean() {
        let mut rng = GrdRng::seed_from_u64(1);
        let n = 200_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = rng.exponential(2.0);
            assert!(x.is_finite() && x >= 0.0);
            sum += x;
        }
        let mean = sum / n as f64;
        // SE = 0.5 / sqrt(n)
        assert!((mean - 0.5).abs() < 5.0 * 0.5 / (n as f64).sqrt());
    }
}
