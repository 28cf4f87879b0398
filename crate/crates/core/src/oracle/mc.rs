//! Monte Carlo means with standard errors.

use serde::Serialize;

use crate::error::{GrdError, Result};
use crate::sampling::SampleBatch;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√n`.
    pub se: f64,
    pub n: usize,
}

impl McEstimate {
    /// `|self - other|` in units of the combined standard error.
    pub fn z_distance(&self, other: &McEstimate) -> f64 {
        (self.mean - other.mean).abs() / self.se.hypot(other.se)
    }

    /// `|self - value|` in units of `self.se`.
    pub fn z_to(&self, value: f64) -> f64 {
        (self.mean - value).abs() / self.se
    }
}

/// Mean and standard error by Welford's recurrence.
pub fn mc_estimate(values: &[f64]) -> Result<McEstimate> {
    if values.len() < 2 {
        return Err(GrdError::EmptyInput);
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &x) in values.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    let n = values.len();
    let var = m2 / (n - 1) as f64;
    Ok(McEstimate {
        mean,
        se: (var / n as f64).sqrt(),
        n,
    })
}

/// Functionals of a draw. Coordinates are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Statistic {
    Constant(f64),
    /// `Y_k`
    Y(usize),
    /// `Z_k`, `k` in `2..=d`
    Z(usize),
    /// `Y_1^{-power}`
    InverseY1(f64),
    /// `Π Y_k^{n_k}`
    Monomial(Vec<u32>),
    /// `Π Z_k^{n_k}`
    LogGapMonomial(Vec<u32>),
    /// `1{Y_k <= x}`
    BelowY { k: usize, x: f64 },
}

impl Statistic {
    fn check(&self, d: usize) -> Result<()> {
        let bad = |msg: String| Err(GrdError::InvalidArgument(msg));
        match self {
            Statistic::Y(k) | Statistic::BelowY { k, .. } if *k == 0 || *k > d => {
                bad(format!("coordinate {k} outside 1..={d}"))
            }
            Statistic::Z(k) if *k < 2 || *k > d => bad(format!("log gap Z_{k} outside 2..={d}")),
            Statistic::Monomial(n) if n.len() != d => Err(GrdError::LengthMismatch {
                what: "monomial exponents",
                expected: d,
                found: n.len(),
            }),
            Statistic::LogGapMonomial(n) if n.len() + 1 != d => Err(GrdError::LengthMismatch {
                what: "log-gap exponents",
                expected: d - 1,
                found: n.len(),
            }),
            _ => Ok(()),
        }
    }

    fn eval(&self, batch: &SampleBatch, i: usize) -> f64 {
        match self {
            Statistic::Constant(c) => *c,
            Statistic::Y(k) => batch.y[k - 1][i],
            Statistic::Z(k) => batch.z[k - 2][i],
            Statistic::InverseY1(s) => batch.y[0][i].powf(-s),
            Statistic::Monomial(n) => n
                .iter()
                .zip(&batch.y)
                .map(|(&p, col)| col[i].powi(p as i32))
                .product(),
            Statistic::LogGapMonomial(n) => n
                .iter()
                .zip(&batch.z)
                .map(|(&p, col)| col[i].powi(p as i32))
                .product(),
            Statistic::BelowY { k, x } => f64::from(u8::from(batch.y[k - 1][i] <= *x)),
        }
    }
}

/// [`mc_estimate`] of `statistic` over the draws in `batch`.
pub fn mc_statistic(batch: &SampleBatch, statistic: &Statistic) -> Result<McEstimate> {
    statistic.check(batch.dim())?;
    let values: Vec<f64> = (0..batch.len()).map(|i| statistic.eval(batch, i)).collect();
    mc_estimate(&values)
}
