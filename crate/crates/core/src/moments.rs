//! Closed-form moments: ratio and negative moments when `ā_1 = 0`, positive
//! moments up to order `M` when `ā_1 = -M`, and first-moment calibration.
//!
//! Every formula is a sum over weak compositions of
//! `multinomial(N; m) · Π_{k>=2} ā_k / (ā_k + m̄_k + n̄_k)`, evaluated in log
//! space.

use crate::compositions::{enumerate_compositions, log_multinomial_unchecked};
use crate::error::{GrdError, Result};
use crate::logspace::LogAccumulator;
use crate::params::{GrdParams, OrderedPoint};

/// Tail sums of an exponent vector `n`, checked against the dimension.
fn exponent_tail(p: &GrdParams, n: &[u32]) -> Result<Vec<u64>> {
    if n.len() != p.dim() {
        return Err(GrdError::LengthMismatch {
            what: "moment exponents",
            expected: p.dim(),
            found: n.len(),
        });
    }
    let mut tail = vec![0u64; n.len()];
    let mut acc = 0u64;
    for k in (0..n.len()).rev() {
        acc += n[k] as u64;
        tail[k] = acc;
    }
    Ok(tail)
}

/// `log Σ_{m ∈ ℕ₀^d(total)} multinomial(total; m) Π_{k>=2} ā_k/(ā_k + m̄_k + shift_k)`.
pub(crate) fn log_composition_sum(tail: &[f64], total: u32, shift: &[u64]) -> Result<f64> {
    let d = tail.len();
    let mut acc = LogAccumulator::default();
    for m in enumerate_compositions(d, total)? {
        let mut log_term = log_multinomial_unchecked(&m);
        for k in 1..d {
            let rate = tail[k];
            log_term += rate.ln() - (rate + m.tail()[k] as f64 + shift[k] as f64).ln();
        }
        acc.push(log_term);
    }
    Ok(acc.log_value())
}

/// `E_a[Π Y_k^{n_k} / Y_1^M]` for zero-sum `a` and `M >= n̄_1`.
pub fn ratio_moment_zero_sum(p: &GrdParams, n: &[u32], power: u32) -> Result<f64> {
    p.require_zero_sum()?;
    let shift = exponent_tail(p, n)?;
    let order = shift[0];
    if (power as u64) < order {
        return Err(GrdError::BadMomentOrder {
            order,
            power: power as u64,
        });
    }
    let rest = power - order as u32;
    if rest == 0 {
        // single composition m = 0
        let tail = p.tail();
        return Ok((1..p.dim())
            .map(|k| tail[k] / (tail[k] + shift[k] as f64))
            .product());
    }
    Ok(log_composition_sum(p.tail(), rest, &shift)?.exp())
}

/// `E_a[Y_1^{-M}]` for zero-sum `a`.
pub fn negative_moment_y1(p: &GrdParams, power: u32) -> Result<f64> {
    ratio_moment_zero_sum(p, &vec![0; p.dim()], power)
}

/// Cached `log Σ_{m ∈ ℕ₀^d(M)} multinomial · Π ā_k/(ā_k + m̄_k)`.
pub(crate) fn log_mixture_normalizer(p: &GrdParams, m: u32) -> Result<f64> {
    if let Some(&v) = p.log_denominator.get() {
        return Ok(v);
    }
    let v = log_composition_sum(p.tail(), m, &vec![0; p.dim()])?;
    Ok(*p.log_denominator.get_or_init(|| v))
}

/// `E_a[Π Y_k^{n_k}]` for `ā_1 = -M` and `n̄_1 <= M`.
pub fn positive_moments(p: &GrdParams, n: &[u32]) -> Result<f64> {
    let m = p.negative_integer_order()?;
    let shift = exponent_tail(p, n)?;
    let order = shift[0];
    if order > m as u64 {
        return Err(GrdError::MomentOrderTooHigh {
            order,
            max: m as u64,
        });
    }
    let numerator = log_composition_sum(p.tail(), m - order as u32, &shift)?;
    let denominator = log_mixture_normalizer(p, m)?;
    Ok((numerator - denominator).exp())
}

/// `(E_a[Y_1], ..., E_a[Y_d])` when `ā_1 = -1`.
pub fn mean_vector_m1(p: &GrdParams) -> Result<Vec<f64>> {
    if p.negative_integer_order()? != 1 {
        return Err(GrdError::NotNegativeIntegerSum { total: p.total() });
    }
    let tail = p.tail();
    let mut products = Vec::with_capacity(p.dim());
    let mut running = 1.0;
    products.push(running);
    for &t in &tail[1..] {
        running *= t / (t + 1.0);
        products.push(running);
    }
    let c: f64 = products.iter().sum();
    Ok(products.into_iter().map(|x| x / c).collect())
}

/// Parameters with `ā_1 = -1` whose mean vector is the strictly ordered
/// target `y`.
pub fn calibrate_first_moment(y: &OrderedPoint) -> Result<GrdParams> {
    let y = y.as_slice();
    let d = y.len();
    // q_k = y_k / (y_{k-1} - y_k) becomes the tail sum ā_k
    let mut q = Vec::with_capacity(d - 1);
    for k in 1..d {
        let gap = y[k - 1] - y[k];
        if gap <= 0.0 {
            return Err(GrdError::TiedOrZeroWeights { k });
        }
        q.push(y[k] / gap);
    }
    if y[d - 1] <= 0.0 {
        return Err(GrdError::TiedOrZeroWeights { k: d });
    }
    let mut a = Vec::with_capacity(d);
    a.push(-1.0 - q[0]);
    for k in 1..d - 1 {
        a.push(q[k - 1] - q[k]);
    }
    a.push(q[d - 2]);
    GrdParams::new(a)
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
    fn ratio_moment_examples() {
        let v = ratio_moment_zero_sum(&p(&[-1.0, 1.0]), &[0, 1], 1).unwrap();
        assert_relative_eq!(v, 0.5, max_relative = 1e-14);
        let v = ratio_moment_zero_sum(&p(&[-1.0, 1.0]), &[1, 0], 1).unwrap();
        assert_eq!(v, 1.0);
        let v = ratio_moment_zero_sum(&p(&[-2.0, 2.0]), &[0, 0], 1).unwrap();
        assert_relative_eq!(v, 5.0 / 3.0, max_relative = 1e-14);
        assert!(matches!(
            ratio_moment_zero_sum(&p(&[-1.0, 1.0]), &[1, 1], 1),
            Err(GrdError::BadMomentOrder { order: 2, power: 1 })
        ));
        assert!(matches!(
            ratio_moment_zero_sum(&p(&[-3.0, 2.0]), &[0, 0], 1),
            Err(GrdError::NotZeroSum { .. })
        ));
    }

    #[test]
    fn ratio_moment_top_order_is_a_product() {
        let q = p(&[-6.0, 1.5, 2.0, 2.5]);
        let n = [1, 0, 2, 1];
        let tail = q.tail();
        // n̄ = (4, 3, 3, 1)
        let want = tail[1] / (tail[1] + 3.0) * tail[2] / (tail[2] + 3.0) * tail[3] / (tail[3] + 1.0);
        assert_eq!(ratio_moment_zero_sum(&q, &n, 4).unwrap(), want);
    }

    #[test]
    fn negative_moment_examples() {
        assert_relative_eq!(
            negative_moment_y1(&p(&[-1.0, 1.0]), 1).unwrap(),
            1.5,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            negative_moment_y1(&p(&[-2.0, 2.0]), 1).unwrap(),
            5.0 / 3.0,
            max_relative = 1e-14
        );
        assert_eq!(negative_moment_y1(&p(&[-1.0, 1.0]), 0).unwrap(), 1.0);
    }

    #[test]
    fn positive_moment_examples() {
        let q = p(&[-3.0, 2.0]);
        assert_relative_eq!(positive_moments(&q, &[1, 0]).unwrap(), 0.6, max_relative = 1e-14);
        assert_relative_eq!(positive_moments(&q, &[0, 1]).unwrap(), 0.4, max_relative = 1e-14);
        let q = p(&[-4.0, 2.0]);
        assert_relative_eq!(
            positive_moments(&q, &[2, 0]).unwrap(),
            6.0 / 17.0,
            max_relative = 1e-14
        );
        let q = p(&[-2.5, -0.5, 2.0]);
        assert_relative_eq!(positive_moments(&q, &[1, 0, 0]).unwrap(), 0.5, max_relative = 1e-14);
        assert!(matches!(
            positive_moments(&p(&[-3.0, 2.0]), &[1, 1]),
            Err(GrdError::MomentOrderTooHigh { order: 2, max: 1 })
        ));
        assert!(matches!(
            positive_moments(&p(&[-1.0, 1.0]), &[1, 0]),
            Err(GrdError::NotNegativeIntegerSum { .. })
        ));
        assert!(matches!(
            positive_moments(&p(&[-3.0, 2.0]), &[1, 0, 0]),
            Err(GrdError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn mean_vector_examples() {
        let m = mean_vector_m1(&p(&[-3.0, 2.0])).unwrap();
        assert_relative_eq!(m[0], 0.6, max_relative = 1e-15);
        assert_relative_eq!(m[1], 0.4, max_relative = 1e-15);
        let m = mean_vector_m1(&p(&[-2.5, -0.5, 2.0])).unwrap();
        for (got, want) in m.iter().zip([0.5, 0.3, 0.2]) {
            assert_relative_eq!(*got, want, max_relative = 1e-15);
        }
        assert!(mean_vector_m1(&p(&[-4.0, 2.0])).is_err());
    }

    #[test]
    fn calibration_examples() {
        let y = OrderedPoint::new(vec![0.6, 0.4]).unwrap();
        let a = calibrate_first_moment(&y).unwrap();
        assert_relative_eq!(a.a()[0], -3.0, max_relative = 1e-14);
        assert_relative_eq!(a.a()[1], 2.0, max_relative = 1e-14);

        let y = OrderedPoint::new(vec![0.5, 0.3, 0.2]).unwrap();
        let a = calibrate_first_moment(&y).unwrap();
        for (got, want) in a.a().iter().zip([-2.5, -0.5, 2.0]) {
            assert_relative_eq!(*got, want, max_relative = 1e-14);
        }

        let tied = OrderedPoint::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(
            calibrate_first_moment(&tied).unwrap_err(),
            GrdError::TiedOrZeroWeights { k: 1 }
        );
        let zero = OrderedPoint::new(vec![0.7, 0.3, 0.0]).unwrap();
        assert!(calibrate_first_moment(&zero).is_err());
    }

    #[test]
    fn denominator_is_cached_once() {
        let q = p(&[-4.0, 1.0, 1.0]);
        assert!(q.log_denominator.get().is_none());
        positive_moments(&q, &[1, 0, 0]).unwrap();
        let first = *q.log_denominator.get().unwrap();
        positive_moments(&q, &[0, 1, 1]).unwrap();
        assert_eq!(*q.log_denominator.get().unwrap(), first);
    }

    proptest::proptest! {
        #[test]
        fn calibration_round_trip(raw in proptest::collection::vec(0.01f64..1.0, 2..7)) {
            let mut y = raw.clone();
            y.sort_by(|a, b| b.partial_cmp(a).unwrap());
            proptest::prop_assume!(y.windows(2).all(|w| w[0] - w[1] > 1e-3));
            let s: f64 = y.iter().sum();
            y.iter_mut().for_each(|v| *v /= s);
            let fix: f64 = 1.0 - y[1..].iter().sum::<f64>();
            y[0] = fix;
            let target = OrderedPoint::new(y.clone()).unwrap();
            let params = calibrate_first_moment(&target).unwrap();
            proptest::prop_assert!((params.total() + 1.0).abs() < 1e-9);
            let mean = mean_vector_m1(&params).unwrap();
            for (m, t) in mean.iter().zip(&y) {
                proptest::prop_assert!((m - t).abs() < 1e-10);
            }
        }

        #[test]
        fn positive_moments_agree_with_mean_vector(
            tails in proptest::collection::vec(0.05f64..5.0, 1..5)
        ) {
            // a built from tail sums with ā_1 = -1
            let d = tails.len() + 1;
            let mut t = vec![-1.0];
            t.extend(tails.iter().copied());
            let mut a: Vec<f64> = (0..d - 1).map(|k| t[k] - t[k + 1]).collect();
            a.push(t[d - 1]);
            let params = validate_params(&a).unwrap();
            proptest::prop_assume!(params.negative_integer_order().ok() == Some(1));
            let mean = mean_vector_m1(&params).unwrap();
            let mut total = 0.0;
            for k in 0..d {
                let mut n = vec![0; d];
                n[k] = 1;
                let v = positive_moments(&params, &n).unwrap();
                proptest::prop_assert!((v - mean[k]).abs() <= 1e-12 * mean[k]);
                total += v;
            }
            proptest::prop_assert!((total - 1.0).abs() < 1e-10);
            proptest::prop_assert!(mean.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
