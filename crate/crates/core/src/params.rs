//! Parameter vectors, points of the ordered simplex and the unnormalized
//! density.
//!
//! A parameter `a = (a_1, ..., a_d)` is admissible when every tail sum
//! `ā_k = a_k + ... + a_d` with `k >= 2` is strictly positive. The total
//! `ā_1` may have any sign and decides which closed forms apply, see
//! [`ParamCase`].

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{GrdError, Result};
use crate::mixture::LogGapVector;

/// Absolute tolerance for `ā_1 = 0` and for `Σ y_k = 1`.
pub const ZERO_SUM_TOL: f64 = 1e-12;
/// Absolute tolerance used when recognising `ā_1 = -M` for an integer `M`.
pub const INTEGER_TOL: f64 = 1e-9;

/// Which family of formulas applies to a parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum ParamCase {
    /// `ā_1 = 0`.
    ZeroSum,
    /// `ā_1 = -M` for an integer `M >= 1`.
    NegativeIntegerSum { m: u32 },
    /// Anything else; `r = -ā_1`.
    General { r: f64 },
}

/// A validated parameter vector with cached tail sums.
#[derive(Debug, Clone)]
pub struct GrdParams {
    a: Vec<f64>,
    tail: Vec<f64>,
    // log of Σ_{m ∈ ℕ₀^d(M)} multinomial · Π ā_k/(ā_k + m̄_k), shared by the
    // positive moments and the mixture weights.
    pub(crate) log_denominator: OnceLock<f64>,
}

impl PartialEq for GrdParams {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a
    }
}

/// Validates `a` and caches its tail sums.
pub fn validate_params(a: &[f64]) -> Result<GrdParams> {
    GrdParams::new(a.to_vec())
}

pub(crate) fn tail_sums(a: &[f64]) -> Vec<f64> {
    let mut tail = vec![0.0; a.len()];
    let mut acc = 0.0;
    for k in (0..a.len()).rev() {
        acc += a[k];
        tail[k] = acc;
    }
    tail
}

impl GrdParams {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.len() < 2 {
            return Err(GrdError::DimensionTooSmall { d: a.len() });
        }
        if let Some(k) = a.iter().position(|x| !x.is_finite()) {
            return Err(GrdError::NonFiniteInput { k: k + 1 });
        }
        let tail = tail_sums(&a);
        if let Some(k) = (1..tail.len()).rev().find(|&k| tail[k] <= 0.0) {
            return Err(GrdError::TailSumViolation {
                k: k + 1,
                tail: tail[k],
            });
        }
        Ok(GrdParams {
            a,
            tail,
            log_denominator: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// Tail sums, `tail()[k] = a_{k+1} + ... + a_d` in 0-based indexing.
    pub fn tail(&self) -> &[f64] {
        &self.tail
    }

    /// `ā_1 = a_1 + ... + a_d`.
    pub fn total(&self) -> f64 {
        self.tail[0]
    }

    /// The exponential rates `ā_2, ..., ā_d` of the log gaps under the
    /// zero-sum law.
    pub fn gap_rates(&self) -> &[f64] {
        &self.tail[1..]
    }

    pub fn case(&self) -> ParamCase {
        let total = self.total();
        if total.abs() <= ZERO_SUM_TOL {
            return ParamCase::ZeroSum;
        }
        let m = (-total).round();
        if m >= 1.0 && (total + m).abs() <= INTEGER_TOL && m <= u32::MAX as f64 {
            return ParamCase::NegativeIntegerSum { m: m as u32 };
        }
        ParamCase::General { r: -total }
    }

    pub fn is_zero_sum(&self) -> bool {
        matches!(self.case(), ParamCase::ZeroSum)
    }

    pub(crate) fn require_zero_sum(&self) -> Result<()> {
        if self.is_zero_sum() {
            Ok(())
        } else {
            Err(GrdError::NotZeroSum {
                total: self.total(),
            })
        }
    }

    /// `M` when `ā_1 = -M` for an integer `M >= 1`.
    pub fn negative_integer_order(&self) -> Result<u32> {
        match self.case() {
            ParamCase::NegativeIntegerSum { m } => Ok(m),
            _ => Err(GrdError::NotNegativeIntegerSum {
                total: self.total(),
            }),
        }
    }

    /// The zero-sum parameter `a - ā_1 e_1`, built by setting `a_1 = -ā_2`
    /// so that its total is exactly zero.
    pub fn zero_sum_partner(&self) -> GrdParams {
        let mut a = self.a.clone();
        a[0] = -self.tail[1];
        let mut tail = self.tail.clone();
        tail[0] = 0.0;
        GrdParams {
            a,
            tail,
            log_denominator: OnceLock::new(),
        }
    }

    /// Σ_k (a_k - 1) log y_k, extended to the boundary of the simplex.
    ///
    /// A coordinate with `y_k = 0` contributes `+∞` when `a_k < 1`, `-∞`
    /// when `a_k > 1` and `0` when `a_k = 1`. When several zero coordinates
    /// disagree, the sign of `Σ_{y_k = 0} (a_k - 1)` decides.
    pub fn log_density_unnormalized(&self, y: &OrderedPoint) -> Result<f64> {
        if y.dim() != self.dim() {
            return Err(GrdError::LengthMismatch {
                what: "point",
                expected: self.dim(),
                found: y.dim(),
            });
        }
        let mut finite = 0.0;
        let mut boundary_exponent = 0.0;
        for (&ak, &yk) in self.a.iter().zip(y.as_slice()) {
            if yk == 0.0 {
                boundary_exponent += ak - 1.0;
            } else {
                finite += (ak - 1.0) * yk.ln();
            }
        }
        Ok(if boundary_exponent < 0.0 {
            f64::INFINITY
        } else if boundary_exponent > 0.0 {
            f64::NEG_INFINITY
        } else {
            finite
        })
    }

    /// `Q_a = Π_{k>=2} 1/ā_k`, valid only when `ā_1 = 0`.
    pub fn normalizing_constant_zero_sum(&self) -> Result<f64> {
        self.require_zero_sum()?;
        let log_q: f64 = -self.tail[1..].iter().map(|t| t.ln()).sum::<f64>();
        Ok(log_q.exp())
    }

    /// Normalized log-density; only available when `ā_1 = 0`.
    pub fn log_density_zero_sum(&self, y: &OrderedPoint) -> Result<f64> {
        let q = self.normalizing_constant_zero_sum()?;
        Ok(self.log_density_unnormalized(y)? - q.ln())
    }
}

/// A point `y_1 >= ... >= y_d >= 0` with `Σ y_k = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct OrderedPoint(Vec<f64>);

impl OrderedPoint {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        if y.len() < 2 {
            return Err(GrdError::DimensionTooSmall { d: y.len() });
        }
        if let Some(k) = y.iter().position(|x| !x.is_finite()) {
            return Err(GrdError::NonFiniteInput { k: k + 1 });
        }
        let bad = |reason: String| Err(GrdError::NotInOrderedSimplex { reason });
        if let Some(k) = y.iter().position(|&x| !(0.0..=1.0 + ZERO_SUM_TOL).contains(&x)) {
            return bad(format!("y_{} = {} is outside [0, 1]", k + 1, y[k]));
        }
        if let Some(k) = y.windows(2).position(|w| w[0] < w[1]) {
            return bad(format!(
                "y_{} = {} is smaller than y_{} = {}",
                k + 1,
                y[k],
                k + 2,
                y[k + 1]
            ));
        }
        let sum: f64 = y.iter().sum();
        if (sum - 1.0).abs() > ZERO_SUM_TOL {
            return bad(format!("coordinates sum to {sum}"));
        }
        Ok(OrderedPoint(y))
    }

    /// Skips validation; for internal constructions that are ordered by
    /// design.
    pub(crate) fn new_unchecked(y: Vec<f64>) -> Self {
        OrderedPoint(y)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `Z_k = log y_{k-1} - log y_k` for `k = 2..d`.
    pub fn log_gaps(&self) -> LogGapVector {
        LogGapVector::from_point(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn validates_tail_sums() {
        let p = validate_params(&[-1.0, 1.0]).unwrap();
        assert_eq!(p.tail(), &[0.0, 1.0]);
        assert_eq!(p.case(), ParamCase::ZeroSum);

        let err = validate_params(&[1.0, 1.0, -1.0]).unwrap_err();
        assert!(matches!(err, GrdError::TailSumViolation { k: 3, .. }));

        let p = validate_params(&[-2.0, -1.0, 4.0]).unwrap();
        assert_eq!(p.tail(), &[1.0, 3.0, 4.0]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            validate_params(&[1.0]),
            Err(GrdError::DimensionTooSmall { d: 1 })
        ));
        assert!(matches!(
            validate_params(&[1.0, f64::NAN]),
            Err(GrdError::NonFiniteInput { k: 2 })
        ));
        // ā_2 = 0 is not enough
        assert!(matches!(
            validate_params(&[1.0, 1.0, -1.0, 1.0]),
            Err(GrdError::TailSumViolation { k: 3, .. })
        ));
    }

    #[test]
    fn classifies_cases() {
        let case = |a: &[f64]| validate_params(a).unwrap().case();
        assert_eq!(case(&[-3.0, 2.0]), ParamCase::NegativeIntegerSum { m: 1 });
        assert_eq!(case(&[-4.0, 2.0]), ParamCase::NegativeIntegerSum { m: 2 });
        assert_eq!(case(&[-5.0, 2.0, 3.0]), ParamCase::ZeroSum);
        assert_eq!(case(&[-3.0, 0.5, 1.0]), ParamCase::General { r: 1.5 });
        assert_eq!(case(&[1.0, 1.0]), ParamCase::General { r: -2.0 });
        assert_eq!(
            case(&[-3.0 + 5e-10, 2.0]),
            ParamCase::NegativeIntegerSum { m: 1 }
        );
    }

    #[test]
    fn zero_sum_partner_is_exact() {
        let p = validate_params(&[-3.1, 0.7, 1.3]).unwrap();
        let z = p.zero_sum_partner();
        assert_eq!(z.total(), 0.0);
        assert_eq!(z.tail()[1..], p.tail()[1..]);
        assert_eq!(z.a()[0], -2.0);
    }

    #[test]
    fn log_density_examples() {
        let p = validate_params(&[-1.0, 1.0]).unwrap();
        let y = OrderedPoint::new(vec![0.5, 0.5]).unwrap();
        assert_relative_eq!(
            p.log_density_unnormalized(&y).unwrap(),
            2.0 * 2f64.ln(),
            max_relative = 1e-15
        );
        assert!(matches!(
            OrderedPoint::new(vec![0.4, 0.6]),
            Err(GrdError::NotInOrderedSimplex { .. })
        ));
        // 0 · log 0 = 0 and (a_1 - 1) log 1 = 0
        let corner = OrderedPoint::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(p.log_density_unnormalized(&corner).unwrap(), 0.0);
    }

    #[test]
    fn log_density_boundary_conventions() {
        let corner = OrderedPoint::new(vec![1.0, 0.0]).unwrap();
        let neg_zero = OrderedPoint::new(vec![1.0, -0.0]).unwrap();
        for a2 in [0.5, 1.0, 2.0] {
            let p = validate_params(&[-1.0, a2]).unwrap();
            let v = p.log_density_unnormalized(&corner).unwrap();
            assert_eq!(v, p.log_density_unnormalized(&neg_zero).unwrap());
            if a2 < 1.0 {
                assert_eq!(v, f64::INFINITY);
            } else if a2 > 1.0 {
                assert_eq!(v, f64::NEG_INFINITY);
            } else {
                assert_eq!(v, 0.0);
            }
        }
        // conflicting zero coordinates resolved by the summed exponent
        let y = OrderedPoint::new(vec![1.0, 0.0, 0.0]).unwrap();
        let p = validate_params(&[-2.0, 0.5, 1.5]).unwrap();
        assert_eq!(p.log_density_unnormalized(&y).unwrap(), 0.0);
        let p = validate_params(&[-2.0, 0.5, 2.5]).unwrap();
        assert_eq!(p.log_density_unnormalized(&y).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn ordered_point_checks() {
        assert!(OrderedPoint::new(vec![0.5, 0.5]).is_ok());
        assert!(OrderedPoint::new(vec![0.6, 0.3]).is_err());
        assert!(OrderedPoint::new(vec![0.6, 0.4 + 1e-13]).is_ok());
        assert!(OrderedPoint::new(vec![1.2, -0.2]).is_err());
        assert!(OrderedPoint::new(vec![1.0]).is_err());
    }

    #[test]
    fn normalizing_constant_examples() {
        let q = |a: &[f64]| validate_params(a).unwrap().normalizing_constant_zero_sum();
        assert_relative_eq!(q(&[-1.0, 1.0]).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(
            q(&[-5.0, 2.0, 3.0]).unwrap(),
            1.0 / 15.0,
            max_relative = 1e-14
        );
        assert!(matches!(
            q(&[-3.0, 2.0]),
            Err(GrdError::NotZeroSum { total }) if total == -1.0
        ));
    }

    proptest::proptest! {
        #[test]
        fn cached_tail_matches_recomputation(a in proptest::collection::vec(-5.0f64..5.0, 2..8)) {
            if let Ok(p) = validate_params(&a) {
                let d = a.len();
                for k in 0..d {
                    let direct: f64 = a[k..].iter().sum();
                    let scale = a[k..].iter().map(|x| x.abs()).sum::<f64>().max(1.0);
                    proptest::prop_assert!((p.tail()[k] - direct).abs() <= 1e-12 * scale);
                }
                proptest::prop_assert!(p.tail()[1..].iter().all(|&t| t > 0.0));
            } else {
                let tail = tail_sums(&a);
                proptest::prop_assert!(tail[1..].iter().any(|&t| t <= 0.0));
            }
        }
    }
}
