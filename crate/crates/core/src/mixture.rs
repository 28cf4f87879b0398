//! Finite mixture representation for `ā_1 = -M` and the log-gap laws.
//!
//! When `ā_1 = -M`, GRD(a) is the mixture over `m ∈ ℕ₀^d(M)` of the
//! zero-sum laws GRD(a + m) with weights
//! `w_m ∝ multinomial(M; m) Π_{k>=2} ā_k / (ā_k + m̄_k)`. Under GRD(a + m)
//! the log gaps are independent with `Z_k ~ Exp(ā_k + m̄_k)`, which gives the
//! MGF and all moments of the log gaps in closed form.

use serde::Serialize;
use statrs::function::factorial::ln_factorial;

use crate::compositions::{
    enumerate_compositions, log_multinomial_unchecked, Composition, MixtureTable,
    NegativeWeightPolicy,
};
use crate::error::{GrdError, Result};
use crate::logspace::LogAccumulator;
use crate::moments::{log_mixture_normalizer, negative_moment_y1};
use crate::params::{GrdParams, OrderedPoint};

/// Log gaps `(Z_2, ..., Z_d)`, all nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LogGapVector(Vec<f64>);

impl LogGapVector {
    pub fn new(z: Vec<f64>) -> Result<Self> {
        if let Some(k) = z.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(GrdError::InvalidArgument(format!(
                "log gap Z_{} = {} must be finite and nonnegative",
                k + 2,
                z[k]
            )));
        }
        Ok(LogGapVector(z))
    }

    pub(crate) fn from_point(y: &OrderedPoint) -> Self {
        let y = y.as_slice();
        LogGapVector(y.windows(2).map(|w| w[0].ln() - w[1].ln()).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// The point with these log gaps:
    /// `Y_1 = (1 + Σ_k exp(-(Z_2 + ... + Z_k)))^{-1}`, `Y_k = Y_{k-1} e^{-Z_k}`.
    pub fn to_point(&self) -> OrderedPoint {
        let mut cumulative = 0.0;
        let mut denom = 1.0;
        for z in &self.0 {
            cumulative += z;
            denom += (-cumulative).exp();
        }
        let mut y = Vec::with_capacity(self.0.len() + 1);
        let mut current = 1.0 / denom;
        y.push(current);
        for z in &self.0 {
            current *= (-z).exp();
            y.push(current);
        }
        OrderedPoint::new_unchecked(y)
    }
}

fn log_weight_terms(p: &GrdParams, m: u32) -> Result<(Vec<Composition>, Vec<f64>)> {
    let tail = p.tail();
    let mut entries = Vec::new();
    let mut logs = Vec::new();
    for c in enumerate_compositions(p.dim(), m)? {
        let mut l = log_multinomial_unchecked(&c);
        for k in 1..p.dim() {
            l += tail[k].ln() - (tail[k] + c.tail()[k] as f64).ln();
        }
        entries.push(c);
        logs.push(l);
    }
    Ok((entries, logs))
}

/// Mixture weights `w_m` over `ℕ₀^d(M)` for `ā_1 = -M`.
pub fn mixture_weights(p: &GrdParams) -> Result<MixtureTable> {
    let m = p.negative_integer_order()?;
    let (entries, logs) = log_weight_terms(p, m)?;
    // populate the shared normalizer while the terms are at hand
    let _ = log_mixture_normalizer(p, m);
    let signs = vec![1i8; entries.len()];
    MixtureTable::from_signed_log_weights(entries, logs, signs, NegativeWeightPolicy::Reject)
}

/// `C = E_{a + M e_1}[Y_1^{-M}]`.
fn mixture_constant(p: &GrdParams, m: u32) -> Result<f64> {
    negative_moment_y1(&p.zero_sum_partner(), m)
}

fn check_gap_len(p: &GrdParams, len: usize, what: &'static str) -> Result<()> {
    if len + 1 != p.dim() {
        return Err(GrdError::LengthMismatch {
            what,
            expected: p.dim() - 1,
            found: len,
        });
    }
    Ok(())
}

/// `E_a[exp(t_2 Z_2 + ... + t_d Z_d)]` for `ā_1 = -M` and `t_k < ā_k`.
pub fn loggap_mgf(p: &GrdParams, t: &[f64]) -> Result<f64> {
    let m = p.negative_integer_order()?;
    check_gap_len(p, t.len(), "MGF argument")?;
    check_mgf_domain(p, t)?;
    let tail = p.tail();
    let mut acc = LogAccumulator::default();
    for c in enumerate_compositions(p.dim(), m)? {
        let mut l = log_multinomial_unchecked(&c);
        for k in 1..p.dim() {
            l += tail[k].ln() - (tail[k] - t[k - 1] + c.tail()[k] as f64).ln();
        }
        acc.push(l);
    }
    Ok(acc.log_value().exp() / mixture_constant(p, m)?)
}

pub(crate) fn check_mgf_domain(p: &GrdParams, t: &[f64]) -> Result<()> {
    let rates = p.gap_rates();
    if let Some(i) = t.iter().zip(rates).position(|(t, r)| !(t < r)) {
        return Err(GrdError::MgfDomainViolation {
            k: i + 2,
            t: t[i],
            rate: rates[i],
        });
    }
    Ok(())
}

/// `log Π_{k>=2} ā_k n_k! / (ā_k + m̄_k)^{n_k + 1}`.
pub(crate) fn log_gap_moment_factor(tail: &[f64], m_tail: &[u32], n: &[u32]) -> f64 {
    (1..tail.len())
        .map(|k| {
            let nk = n[k - 1];
            tail[k].ln() + ln_factorial(nk as u64)
                - (nk as f64 + 1.0) * (tail[k] + m_tail[k] as f64).ln()
        })
        .sum()
}

/// `E_a[Π_{k>=2} Z_k^{n_k}]` for `ā_1 = -M`.
pub fn loggap_moments(p: &GrdParams, n: &[u32]) -> Result<f64> {
    let m = p.negative_integer_order()?;
    check_gap_len(p, n.len(), "log-gap exponents")?;
    let tail = p.tail();
    let mut acc = LogAccumulator::default();
    for c in enumerate_compositions(p.dim(), m)? {
        acc.push(log_multinomial_unchecked(&c) + log_gap_moment_factor(tail, c.tail(), n));
    }
    Ok(acc.log_value().exp() / mixture_constant(p, m)?)
}

/// Exponential rates `(ā_2, ..., ā_d)` of the independent log gaps when
/// `ā_1 = 0`; the ratios `Y_{k-1}/Y_k` are then Pareto(1, ā_k).
pub fn loggap_law_zero_sum(p: &GrdParams) -> Result<Vec<f64>> {
    p.require_zero_sum()?;
    Ok(p.gap_rates().to_vec())
}

/// The log-gap law as a finite mixture of independent exponential vectors.
///
/// Covers the zero-sum case (one component) and `ā_1 = -M`.
#[derive(Debug, Clone)]
pub struct LogGapMixture {
    table: MixtureTable,
    rates: Vec<Vec<f64>>,
}

impl LogGapMixture {
    pub fn new(p: &GrdParams) -> Result<Self> {
        let table = if p.is_zero_sum() {
            MixtureTable::from_signed_log_weights(
                vec![Composition::new(vec![0; p.dim()])],
                vec![0.0],
                vec![1],
                NegativeWeightPolicy::Reject,
            )?
        } else {
            mixture_weights(p)?
        };
        Ok(Self::from_table(p, table))
    }

    pub(crate) fn from_table(p: &GrdParams, table: MixtureTable) -> Self {
        let tail = p.tail();
        let rates = table
            .entries()
            .iter()
            .map(|c| (1..p.dim()).map(|k| tail[k] + c.tail()[k] as f64).collect())
            .collect();
        LogGapMixture { table, rates }
    }

    pub fn table(&self) -> &MixtureTable {
        &self.table
    }

    /// Per-component rates `(ā_k + m̄_k)_{k>=2}`, aligned with the table.
    pub fn rates(&self) -> &[Vec<f64>] {
        &self.rates
    }

    /// CDF of the single log gap `Z_k`, `k` in `2..=d`.
    pub fn marginal_cdf(&self, k: usize, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        self.table
            .weights()
            .iter()
            .zip(&self.rates)
            .map(|(w, r)| w * -(-r[k - 2] * z).exp_m1())
            .sum()
    }

    /// Mean of `Z_k` under the (possibly clipped) table.
    pub fn marginal_mean(&self, k: usize) -> f64 {
        self.table
            .weights()
            .iter()
            .zip(&self.rates)
            .map(|(w, r)| w / r[k - 2])
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::validate_params;
    use approx::assert_relative_eq;

    fn p(a: &[f64]) -> GrdParams {
        validate_params(a).unwrap()
    }

    #[test]
    fn weights_examples() {
        let t = mixture_weights(&p(&[-3.0, 2.0])).unwrap();
        assert_relative_eq!(t.weight_of(&[1, 0]), 0.6, max_relative = 1e-14);
        assert_relative_eq!(t.weight_of(&[0, 1]), 0.4, max_relative = 1e-14);

        let t = mixture_weights(&p(&[-4.0, 2.0])).unwrap();
        for (m, w) in [([2, 0], 6.0 / 17.0), ([1, 1], 8.0 / 17.0), ([0, 2], 3.0 / 17.0)] {
            assert_relative_eq!(t.weight_of(&m), w, max_relative = 1e-14);
        }
        assert!(matches!(
            mixture_weights(&p(&[-1.0, 1.0])),
            Err(GrdError::NotNegativeIntegerSum { .. })
        ));
    }

    #[test]
    fn mgf_examples() {
        let q = p(&[-3.0, 2.0]);
        assert_relative_eq!(loggap_mgf(&q, &[0.0]).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(loggap_mgf(&q, &[1.0]).unwrap(), 1.8, max_relative = 1e-14);
        assert_eq!(
            loggap_mgf(&q, &[2.0]).unwrap_err(),
            GrdError::MgfDomainViolation {
                k: 2,
                t: 2.0,
                rate: 2.0
            }
        );
        assert!(loggap_mgf(&q, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn moment_examples() {
        let q = p(&[-3.0, 2.0]);
        assert_relative_eq!(loggap_moments(&q, &[1]).unwrap(), 13.0 / 30.0, max_relative = 1e-14);
        assert_relative_eq!(loggap_moments(&q, &[2]).unwrap(), 7.0 / 18.0, max_relative = 1e-14);
        assert_relative_eq!(loggap_moments(&q, &[0]).unwrap(), 1.0, max_relative = 1e-14);
        let q = p(&[-4.0, 0.5, 1.5]);
        assert_relative_eq!(loggap_moments(&q, &[0, 0]).unwrap(), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn zero_sum_law() {
        assert_eq!(loggap_law_zero_sum(&p(&[-1.0, 1.0])).unwrap(), vec![1.0]);
        assert_eq!(loggap_law_zero_sum(&p(&[-5.0, 2.0, 3.0])).unwrap(), vec![5.0, 3.0]);
        assert!(loggap_law_zero_sum(&p(&[-3.0, 2.0])).is_err());
    }

    #[test]
    fn marginal_cdf_is_the_two_component_mixture() {
        let mix = LogGapMixture::new(&p(&[-3.0, 2.0])).unwrap();
        for z in [0.1_f64, 0.5, 2.0] {
            let want = 0.6 * (1.0 - (-2.0 * z).exp()) + 0.4 * (1.0 - (-3.0 * z).exp());
            assert_relative_eq!(mix.marginal_cdf(2, z), want, max_relative = 1e-14);
        }
        assert_relative_eq!(mix.marginal_mean(2), 13.0 / 30.0, max_relative = 1e-14);
    }

    #[test]
    fn reconstruction_round_trip() {
        let z = LogGapVector::new(vec![0.3, 1.2, 0.0, 2.5]).unwrap();
        let y = z.to_point();
        assert!(OrderedPoint::new(y.as_slice().to_vec()).is_ok());
        for (a, b) in y.log_gaps().as_slice().iter().zip(z.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
        let flat = LogGapVector::new(vec![0.0; 3]).unwrap().to_point();
        assert!(flat.as_slice().iter().all(|&v| (v - 0.25).abs() < 1e-16));
        assert!(LogGapVector::new(vec![-0.1]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn weights_are_a_probability_vector(
            tails in proptest::collection::vec(0.05f64..4.0, 1..4),
            m in 1u32..4,
        ) {
            let d = tails.len() + 1;
            let mut t = vec![-(m as f64)];
            t.extend(tails.iter().copied());
            let mut a: Vec<f64> = (0..d - 1).map(|k| t[k] - t[k + 1]).collect();
            a.push(t[d - 1]);
            let q = validate_params(&a).unwrap();
            proptest::prop_assume!(q.negative_integer_order().ok() == Some(m));
            let table = mixture_weights(&q).unwrap();
            let s: f64 = table.weights().iter().sum();
            proptest::prop_assert!((s - 1.0).abs() < 1e-10);
            proptest::prop_assert!(table.weights().iter().all(|&w| w > 0.0));
            let zero = vec![0.0; d - 1];
            proptest::prop_assert!((loggap_mgf(&q, &zero).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
