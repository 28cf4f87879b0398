//! Kolmogorov-Smirnov tests with asymptotic critical values.

use serde::Serialize;

use crate::error::{GrdError, Result};

/// Smallest sample accepted by [`ks_test`] and by each side of
/// [`ks_two_sample`].
pub const KS_MIN_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical_value: f64,
    /// Asymptotic p-value from the Kolmogorov distribution.
    pub p_value: f64,
    pub alpha: f64,
    pub pass: bool,
}

/// `c(α) = sqrt(-ln(α/2) / 2)`
pub fn kolmogorov_critical(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// `P(K > λ) = 2 Σ_{k>=1} (-1)^{k-1} exp(-2 k² λ²)`
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        // the series is slow here and the value is 1 to double precision
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(GrdError::InvalidArgument(format!("significance {alpha} outside (0, 1)")))
    }
}

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.iter().any(|x| x.is_nan()) {
        return Err(GrdError::InvalidArgument("sample contains NaN".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    Ok(xs)
}

/// One-sample test of `samples` against the continuous CDF `cdf`.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, alpha: f64) -> Result<KsResult> {
    check_alpha(alpha)?;
    let n = samples.len();
    if n < KS_MIN_SAMPLES {
        return Err(GrdError::TooFewSamples { n, min: KS_MIN_SAMPLES });
    }
    let xs = sorted(samples)?;
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f);
    }
    let scale = nf.sqrt();
    let critical_value = kolmogorov_critical(alpha) / scale;
    Ok(KsResult {
        statistic: d,
        critical_value,
        p_value: kolmogorov_survival(scale * d),
        alpha,
        pass: d <= critical_value,
    })
}

/// Two-sample test that `x` and `y` come from the same continuous law.
pub fn ks_two_sample(x: &[f64], y: &[f64], alpha: f64) -> Result<KsResult> {
    check_alpha(alpha)?;
    for n in [x.len(), y.len()] {
        if n < KS_MIN_SAMPLES {
            return Err(GrdError::TooFewSamples { n, min: KS_MIN_SAMPLES });
        }
    }
    let xs = sorted(x)?;
    let ys = sorted(y)?;
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let scale = (n * m / (n + m)).sqrt();
    let critical_value = kolmogorov_critical(alpha) / scale;
    Ok(KsResult {
        statistic: d,
        critical_value,
        p_value: kolmogorov_survival(scale * d),
        alpha,
        pass: d <= critical_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::GrdRng;

    fn exp_draws(rate: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = GrdRng::seed_from_u64(seed);
        (0..n).map(|_| rng.exponential(rate)).collect()
    }

    fn exp_cdf(rate: f64) -> impl Fn(f64) -> f64 {
        move |x: f64| if x <= 0.0 { 0.0 } else { -(-rate * x).exp_m1() }
    }

    #[test]
    fn critical_values() {
        assert!((kolmogorov_critical(0.05) - 1.358_1).abs() < 1e-3);
        assert!((kolmogorov_critical(0.001) - 1.949_5).abs() < 1e-3);
        assert!((kolmogorov_survival(1.358_1) - 0.05).abs() < 1e-4);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
    }

    #[test]
    fn exponential_null_and_alternative() {
        let xs = exp_draws(1.0, 100_000, 11);
        let r = ks_test(&xs, exp_cdf(1.0), 0.001).unwrap();
        assert!(r.pass, "{r:?}");
        let r = ks_test(&xs, exp_cdf(2.0), 0.001).unwrap();
        assert!(!r.pass && r.p_value < 1e-10, "{r:?}");
    }

    #[test]
    fn two_sample() {
        let a = exp_draws(1.0, 20_000, 1);
        let b = exp_draws(1.0, 30_000, 2);
        let c = exp_draws(1.1, 30_000, 3);
        assert!(ks_two_sample(&a, &b, 0.001).unwrap().pass);
        assert!(!ks_two_sample(&a, &c, 0.001).unwrap().pass);
        // identical samples
        assert_eq!(ks_two_sample(&a, &a, 0.001).unwrap().statistic, 0.0);
    }

    #[test]
    fn input_checks() {
        assert_eq!(
            ks_test(&[0.5; 99], exp_cdf(1.0), 0.01),
            Err(GrdError::TooFewSamples { n: 99, min: 100 })
        );
        assert!(ks_test(&[0.5; 100], exp_cdf(1.0), 1.5).is_err());
        assert!(ks_two_sample(&[0.5; 100], &[0.5; 10], 0.01).is_err());
    }

    #[test]
    fn type_one_error_is_near_alpha() {
        let reps = 1000;
        let mut rng = GrdRng::seed_from_u64(2024);
        let mut rejected = 0;
        for _ in 0..reps {
            let xs: Vec<f64> = (0..500).map(|_| rng.exponential(1.0)).collect();
            if !ks_test(&xs, exp_cdf(1.0), 0.01).unwrap().pass {
                rejected += 1;
            }
        }
        let rate = rejected as f64 / reps as f64;
        assert!((0.003..=0.03).contains(&rate), "rate {rate}");
    }
}
