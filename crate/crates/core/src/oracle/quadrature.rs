//! Deterministic integration over the ordered simplex for `d ∈ {2, 3}`.
//!
//! The simplex is parametrized by its trailing coordinates, with `y_1`
//! eliminated through `Σ y = 1`:
//!
//! * `d = 2`: `y_2 ∈ [0, 1/2]`.
//! * `d = 3`: `y_3 ∈ [0, 1/3]`, then `y_2 ∈ [y_3, (1 - y_3)/2]`.
//!
//! Both use Lebesgue measure in those coordinates. The density may have an
//! integrable singularity at `y_d = 0`. We substitute `y_d = u^p` with
//! `p = 1 / min(1, a_d, ā_{d-1})` (for `d = 2` only `a_2` enters), which
//! makes the leading power of `u` nonnegative. The inner `d = 3` integral
//! runs over `s = ln y_2`, where `y_2^{a_2 - 1} dy_2 = e^{a_2 s} ds` is
//! bounded on every slice.
//!
//! Each one-dimensional integral is globally adaptive Gauss-Kronrod (7/15):
//! the interval with the largest error estimate is bisected until the
//! requested tolerance is met or the interval budget runs out. Interval
//! errors are `|K15 - G7|` plus, for nested rules, the weighted inner errors.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{GrdError, Result};
use crate::params::validate_params;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Default interval budget per one-dimensional integral.
pub const DEFAULT_RESOLUTION: usize = 400;

/// Relative error estimate above which [`quadrature_moment`] fails.
pub const ACCEPT_REL_ERROR: f64 = 1e-9;

const OUTER_REL_TOL: f64 = 1e-13;
const INNER_REL_TOL: f64 = 1e-14;

/// Integrand `g` multiplying the unnormalized density.
#[derive(Debug, Clone, PartialEq)]
pub enum Integrand {
    Constant,
    /// `Π y_k^{n_k}`
    Monomial(Vec<u32>),
    /// `Π y_k^{n_k} / y_1^{power}`
    Ratio { n: Vec<u32>, power: u32 },
    /// `y_1^{-s}` for real `s`.
    InversePowerY1(f64),
    /// `Π Z_k^{n_k}` with `Z_k = ln y_{k-1} - ln y_k`, `k = 2..d`.
    LogGapMonomial(Vec<u32>),
}

impl Integrand {
    fn check(&self, d: usize) -> Result<()> {
        let (len, expected, what) = match self {
            Integrand::Monomial(n) | Integrand::Ratio { n, .. } => (n.len(), d, "monomial exponents"),
            Integrand::LogGapMonomial(n) => (n.len(), d - 1, "log-gap exponents"),
            _ => return Ok(()),
        };
        if len != expected {
            return Err(GrdError::LengthMismatch {
                what,
                expected,
                found: len,
            });
        }
        Ok(())
    }

    fn eval(&self, y: &[f64], ln_y: &[f64]) -> f64 {
        let mono = |n: &[u32]| -> f64 { n.iter().zip(y).map(|(&k, v)| v.powi(k as i32)).product() };
        match self {
            Integrand::Constant => 1.0,
            Integrand::Monomial(n) => mono(n),
            Integrand::Ratio { n, power } => mono(n) / y[0].powi(*power as i32),
            Integrand::InversePowerY1(s) => (-s * ln_y[0]).exp(),
            Integrand::LogGapMonomial(n) => n
                .iter()
                .enumerate()
                .map(|(i, &k)| (ln_y[i] - ln_y[i + 1]).powi(k as i32))
                .product(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One GK15 panel. `f` returns a value and its own error estimate.
fn gk15<F: FnMut(f64) -> (f64, f64)>(f: &mut F, lo: f64, hi: f64) -> Piece {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let (fc, ec) = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut inner_err = WGK[7] * ec;
    for i in 0..7 {
        let dx = half * XGK[i];
        let (f1, e1) = f(center - dx);
        let (f2, e2) = f(center + dx);
        kronrod += WGK[i] * (f1 + f2);
        inner_err += WGK[i] * (e1 + e2);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    Piece {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs() + inner_err * half.abs(),
    }
}

fn adaptive<F: FnMut(f64) -> (f64, f64)>(mut f: F, lo: f64, hi: f64, rel_tol: f64, max_pieces: usize) -> Quadrature {
    if hi <= lo {
        return Quadrature { value: 0.0, error: 0.0 };
    }
    let mut heap = BinaryHeap::new();
    heap.push(gk15(&mut f, lo, hi));
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= rel_tol * value.abs() || error == 0.0 || heap.len() >= max_pieces {
            return Quadrature { value, error };
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // cannot split further; keep it and stop
            heap.push(worst);
            let value = heap.iter().map(|p| p.value).sum();
            let error = heap.iter().map(|p| p.error).sum();
            return Quadrature { value, error };
        }
        heap.push(gk15(&mut f, worst.lo, mid));
        heap.push(gk15(&mut f, mid, worst.hi));
    }
}

/// Integrates `Π y_k^{a_k - 1} g(y)` over the ordered simplex with the
/// power substitution `y_d = u^p` and lower limit `y_d >= lower`.
fn integrate(a: &[f64], g: &Integrand, p: f64, lower: f64, resolution: usize) -> Quadrature {
    let d = a.len();
    let u_lo = lower.powf(1.0 / p);
    let u_hi = (1.0 / d as f64).powf(1.0 / p);
    // log of the Jacobian dy_d/du together with y_d^{a_d - 1}
    let outer_log = move |u: f64| -> (f64, f64) {
        let ln_u = u.ln();
        let ln_yd = p * ln_u;
        (ln_yd, (a[d - 1] - 1.0) * ln_yd + p.ln() + (p - 1.0) * ln_u)
    };
    match d {
        2 => adaptive(
            |u| {
                let (ln_y2, log_w) = outer_log(u);
                let y2 = ln_y2.exp();
                let y1 = 1.0 - y2;
                let ln_y1 = (-y2).ln_1p();
                let f = ((a[0] - 1.0) * ln_y1 + log_w).exp() * g.eval(&[y1, y2], &[ln_y1, ln_y2]);
                (f, 0.0)
            },
            u_lo,
            u_hi,
            OUTER_REL_TOL,
            resolution,
        ),
        3 => adaptive(
            |u| {
                let (ln_y3, log_w) = outer_log(u);
                let y3 = ln_y3.exp();
                let s_hi = ((1.0 - y3) / 2.0).ln();
                let inner = adaptive(
                    |s| {
                        let y2 = s.exp();
                        let ln_y1 = (-y2 - y3).ln_1p();
                        let y1 = ln_y1.exp();
                        let log_f = (a[0] - 1.0) * ln_y1 + a[1] * s + log_w;
                        (log_f.exp() * g.eval(&[y1, y2, y3], &[ln_y1, s, ln_y3]), 0.0)
                    },
                    ln_y3,
                    s_hi,
                    INNER_REL_TOL,
                    resolution,
                );
                (inner.value, inner.error)
            },
            u_lo,
            u_hi,
            OUTER_REL_TOL,
            resolution,
        ),
        _ => unreachable!("dimension checked by callers"),
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(GrdError::UnsupportedDimension { d })
    }
}

/// `∫ Π y_k^{a_k - 1} g(y) dy` over the ordered simplex (unnormalized).
///
/// `resolution` is the interval budget of every one-dimensional adaptive
/// rule. Fails with [`GrdError::ToleranceNotReached`] when the error
/// estimate exceeds [`ACCEPT_REL_ERROR`] relative.
pub fn quadrature_moment(a: &[f64], g: &Integrand, resolution: usize) -> Result<Quadrature> {
    check_dim(a.len())?;
    let params = validate_params(a)?;
    g.check(a.len())?;
    let d = a.len();
    let tail = params.tail();
    let mut exponent = a[d - 1].min(1.0);
    if d == 3 {
        exponent = exponent.min(tail[1]);
    }
    let q = integrate(a, g, 1.0 / exponent, 0.0, resolution.max(1));
    if !q.value.is_finite() || q.error > ACCEPT_REL_ERROR * q.value.abs() {
        return Err(GrdError::ToleranceNotReached {
            value: q.value,
            error: q.error,
            tolerance: ACCEPT_REL_ERROR * q.value.abs(),
        });
    }
    Ok(q)
}

/// `E_a[g(Y)]`: [`quadrature_moment`] of `g` divided by that of the constant.
pub fn quadrature_expectation(a: &[f64], g: &Integrand, resolution: usize) -> Result<Quadrature> {
    let num = quadrature_moment(a, g, resolution)?;
    let den = quadrature_moment(a, &Integrand::Constant, resolution)?;
    let value = num.value / den.value;
    Ok(Quadrature {
        value,
        error: value.abs() * (num.error / num.value.abs() + den.error / den.value),
    })
}

/// Unnormalized integral over `{y_d >= lower}` without checking the tail
/// sums. Used to probe whether the full integral is finite: it stays
/// bounded as `lower -> 0` exactly for admissible parameters.
pub fn quadrature_truncated(a: &[f64], g: &Integrand, lower: f64, resolution: usize) -> Result<Quadrature> {
    check_dim(a.len())?;
    g.check(a.len())?;
    if let Some(k) = a.iter().position(|x| !x.is_finite()) {
        return Err(GrdError::NonFiniteInput { k: k + 1 });
    }
    if !(lower > 0.0 && lower < 1.0 / a.len() as f64) {
        return Err(GrdError::InvalidArgument(format!("lower limit {lower} outside (0, 1/d)")));
    }
    Ok(integrate(a, g, 1.0, lower, resolution.max(1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn closed_form_examples() {
        let q = quadrature_moment(&[-1.0, 1.0], &Integrand::Constant, DEFAULT_RESOLUTION).unwrap();
        assert!(rel(q.value, 1.0) < 1e-10, "{q:?}");
        let q = quadrature_moment(&[-5.0, 2.0, 3.0], &Integrand::Constant, DEFAULT_RESOLUTION).unwrap();
        assert!(rel(q.value, 1.0 / 15.0) < 1e-8, "{q:?}");
        let q = quadrature_expectation(&[-4.0, 2.0], &Integrand::Monomial(vec![2, 0]), DEFAULT_RESOLUTION).unwrap();
        assert!(rel(q.value, 6.0 / 17.0) < 1e-8, "{q:?}");
        let q = quadrature_moment(&[-1.0, 1.0], &Integrand::InversePowerY1(0.5), DEFAULT_RESOLUTION).unwrap();
        assert!(rel(q.value, 2.0 / 3.0 * (2f64.powf(1.5) - 1.0)) < 1e-10);
    }

    #[test]
    fn endpoint_singularities() {
        // a_d < 1 and ā_{d-1} < a_d
        for a in [
            vec![-0.3, 0.3],
            vec![-1.0, 0.5, 0.5],
            vec![-2.0, -0.5, 2.5],
            vec![-1.0, 0.8, 0.2],
        ] {
            let tail: Vec<f64> = (1..a.len()).map(|k| a[k..].iter().sum()).collect();
            let q = quadrature_moment(&a, &Integrand::Constant, DEFAULT_RESOLUTION).unwrap();
            assert!(rel(q.value, 1.0 / tail.iter().product::<f64>()) < 1e-9, "{a:?}: {q:?}");
        }
    }

    #[test]
    fn log_gap_mean_is_reciprocal_rate() {
        let q = quadrature_expectation(&[-3.0, 1.0, 2.0], &Integrand::LogGapMonomial(vec![0, 1]), DEFAULT_RESOLUTION)
            .unwrap();
        assert!(rel(q.value, 0.5) < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            quadrature_moment(&[-1.0, 0.5, 0.25, 0.25], &Integrand::Constant, 10),
            Err(GrdError::UnsupportedDimension { d: 4 })
        ));
        assert!(matches!(
            quadrature_moment(&[1.0, 1.0, -1.0], &Integrand::Constant, 10),
            Err(GrdError::TailSumViolation { k: 3, .. })
        ));
        assert!(matches!(
            quadrature_moment(&[-1.0, 1.0], &Integrand::Monomial(vec![1]), 10),
            Err(GrdError::LengthMismatch { .. })
        ));
        assert!(matches!(
            quadrature_moment(&[-1.0, 0.5, 0.5], &Integrand::Constant, 1),
            Err(GrdError::ToleranceNotReached { .. })
        ));
    }

    #[test]
    fn truncation_probe_separates_admissible_parameters() {
        let grow = |a: &[f64]| {
            let coarse = quadrature_truncated(a, &Integrand::Constant, 1e-6, 200).unwrap().value;
            let fine = quadrature_truncated(a, &Integrand::Constant, 1e-12, 200).unwrap().value;
            fine / coarse
        };
        for t in [-0.2, -0.05, 0.0, 0.05, 0.2] {
            // d = 2, ā_2 = a_2 = t
            let ok = t > 0.0;
            let g = grow(&[-1.0, t]);
            assert_eq!(g < 1.8, ok, "a_2 = {t}: growth {g}");
            // d = 3, ā_2 = t with a_3 = 1
            let g = grow(&[-1.0, t - 1.0, 1.0]);
            assert_eq!(g < 1.8, ok, "ā_2 = {t}: growth {g}");
        }
    }
}
