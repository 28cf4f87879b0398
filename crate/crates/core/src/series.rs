//! Series machinery for a general total `ā_1 = -r`.
//!
//! Writing `1/Y_1 = d (1 + X)` with `X = 1/(d Y_1) - 1 ∈ (-1, 0]` and
//! expanding `(1 + X)^r` by Newton's binomial series turns `E[Y_1^{-r}]`
//! and every expectation under GRD(a) into signed sums over
//! `(k, j, m)` with `m ∈ ℕ₀^d(j)`, `j <= k`.
//!
//! For a fixed truncation `K` the `k`-sum can be regrouped per composition.
//! The collapsed coefficients are not sign-definite when `r` is not an
//! integer, and their magnitude grows with `K`; tables report how much
//! negative mass had to be clipped to sample from them.

use serde::Serialize;
use statrs::function::factorial::ln_factorial;

use crate::compositions::{
    composition_count, enumerate_compositions, log_multinomial_unchecked, ClipReport, Composition,
    MixtureTable, NegativeWeightPolicy, DEFAULT_COMPOSITION_CAP,
};
use crate::error::{GrdError, Result};
use crate::logspace::LogAccumulator;
use crate::mixture::LogGapMixture;
use crate::moments::negative_moment_y1;
use crate::params::{GrdParams, INTEGER_TOL};

/// Truncation and safety settings for the series routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesConfig {
    /// Stop once two consecutive increments are below this in absolute value.
    pub tol: f64,
    /// Hard limit on the outer index `k`.
    pub max_k: usize,
    /// Truncation `K` used for sampling tables.
    pub sample_k: usize,
    pub cap: u128,
    pub policy: NegativeWeightPolicy,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            tol: 1e-10,
            max_k: 60,
            sample_k: 20,
            cap: DEFAULT_COMPOSITION_CAP,
            policy: NegativeWeightPolicy::Clip,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesDiagnostics {
    /// Number of outer terms `k = 0..terms_used` summed.
    pub terms_used: usize,
    pub converged: bool,
    pub final_increment: f64,
    /// Estimated rounding error of the last included term.
    pub noise_floor: f64,
    pub partial_sums: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub diagnostics: SeriesDiagnostics,
}

impl SeriesValue {
    /// Turns a non-converged result into [`GrdError::NonConverged`].
    pub fn into_converged(self) -> Result<f64> {
        if self.diagnostics.converged {
            Ok(self.value)
        } else {
            Err(GrdError::NonConverged {
                partial: self.value,
                terms: self.diagnostics.terms_used,
                last_increment: self.diagnostics.final_increment,
            })
        }
    }
}

/// `(r choose k)` for `k = 0..=k_max` by `(r choose k) = (r choose k-1)(r-k+1)/k`.
pub fn generalized_binomials(r: f64, k_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    let mut c = 1.0;
    out.push(c);
    for k in 1..=k_max {
        c *= (r - k as f64 + 1.0) / k as f64;
        out.push(c);
    }
    out
}

/// Rows `0..=n` of Pascal's triangle.
fn pascal(n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut row = vec![1.0; k + 1];
        for j in 1..k {
            row[j] = rows[k - 1][j - 1] + rows[k - 1][j];
        }
        rows.push(row);
    }
    rows
}

/// `r = -ā_1`, snapped to an integer within [`INTEGER_TOL`].
pub fn series_exponent(p: &GrdParams) -> f64 {
    let r = -p.total();
    let rounded = r.round();
    if (r - rounded).abs() <= INTEGER_TOL {
        rounded
    } else {
        r
    }
}

/// Relative rounding assumed for each `T_j` when estimating the noise of
/// the alternating inner sums.
const NOISE_ULPS: f64 = 4.0;

/// Partial sums of `Σ_k (r choose k) Σ_{j<=k} (k choose j)(-1)^{k-j} d^{r-j} T_j`
/// for `k = 0..=max_k`, given `ln T_j` from `log_t`. With `stop_tol` set,
/// summation ends once two consecutive increments fall below it, or
/// unconverged once the estimated rounding noise of the next term exceeds it.
fn newton_series<F>(d: usize, r: f64, max_k: usize, stop_tol: Option<f64>, mut log_t: F) -> Result<SeriesValue>
where
    F: FnMut(u32) -> Result<f64>,
{
    let ln_d = (d as f64).ln();
    let binom_r = generalized_binomials(r, max_k);
    let binom = pascal(max_k);
    // log(d^{r-j} T_j), filled in as j grows
    let mut log_scaled: Vec<f64> = Vec::with_capacity(max_k + 1);

    let mut partial = 0.0;
    let mut partial_sums = Vec::new();
    let mut increment = f64::INFINITY;
    let mut noise_floor = 0.0;
    let mut converged = stop_tol.is_none();
    for k in 0..=max_k {
        log_scaled.push((r - k as f64) * ln_d + log_t(k as u32)?);
        let mut inner = 0.0;
        let mut magnitude = 0.0;
        for j in 0..=k {
            let term = binom[k][j] * log_scaled[j].exp();
            inner += if (k - j) % 2 == 0 { term } else { -term };
            magnitude += term;
        }
        // rounding in T_j is amplified by the alternating sum
        let noise = NOISE_ULPS * f64::EPSILON * (binom_r[k] * magnitude).abs();
        if let Some(tol) = stop_tol {
            if k >= 1 && noise > tol {
                break;
            }
        }
        noise_floor = noise;
        let prev_increment = increment;
        increment = binom_r[k] * inner;
        partial += increment;
        partial_sums.push(partial);
        if let Some(tol) = stop_tol {
            if k >= 1 && increment.abs() < tol && prev_increment.abs() < tol {
                converged = true;
                break;
            }
        }
    }
    Ok(SeriesValue {
        value: partial,
        diagnostics: SeriesDiagnostics {
            terms_used: partial_sums.len(),
            converged,
            final_increment: increment,
            noise_floor,
            partial_sums,
        },
    })
}

/// `E_a[Y_1^{-r}]` for zero-sum `a` by the binomial series.
pub fn expected_power_y1_series(p: &GrdParams, r: f64, config: &SeriesConfig) -> Result<SeriesValue> {
    p.require_zero_sum()?;
    if !r.is_finite() {
        return Err(GrdError::InvalidArgument(format!("exponent r = {r} must be finite")));
    }
    if config.max_k < 1 || !(config.tol > 0.0) {
        return Err(GrdError::InvalidArgument("series needs max_k >= 1 and tol > 0".into()));
    }
    newton_series(p.dim(), r, config.max_k, Some(config.tol), |j| {
        Ok(negative_moment_y1(p, j)?.ln())
    })
}

/// Collapsed coefficients `c_j(K) = Σ_{k=j}^{K} (r choose k)(k choose j)(-1)^{k-j}`,
/// evaluated through the identity
/// `c_j(K) = (r choose j) (-1)^{K-j} (r-j-1 choose K-j)`, which has no
/// cancellation.
pub fn collapsed_coefficients(r: f64, k_trunc: usize) -> Vec<f64> {
    let binom_r = generalized_binomials(r, k_trunc);
    (0..=k_trunc)
        .map(|j| {
            let sign = if (k_trunc - j).is_multiple_of(2) { 1.0 } else { -1.0 };
            let rest = generalized_binomials(r - j as f64 - 1.0, k_trunc - j)[k_trunc - j];
            binom_r[j] * sign * rest
        })
        .collect()
}

/// Unnormalized collapsed weight terms over `{m : m̄_1 <= K}`, in log
/// magnitude and sign, ordered by `m̄_1` then reverse-lexicographically.
struct SignedTerms {
    entries: Vec<Composition>,
    log_abs: Vec<f64>,
    signs: Vec<i8>,
}

fn signed_terms(p: &GrdParams, k_trunc: usize, cap: u128) -> Result<SignedTerms> {
    let d = p.dim();
    let needed = composition_count(d + 1, k_trunc as u32);
    if needed > cap {
        return Err(GrdError::CapExceeded {
            required: needed,
            cap,
        });
    }
    let r = series_exponent(p);
    let ln_d = (d as f64).ln();
    let coeffs = collapsed_coefficients(r, k_trunc);
    let tail = p.tail();
    let mut out = SignedTerms {
        entries: Vec::new(),
        log_abs: Vec::new(),
        signs: Vec::new(),
    };
    for (j, &c) in coeffs.iter().enumerate() {
        let base = c.abs().ln() + (r - j as f64) * ln_d;
        let sign = if c < 0.0 { -1 } else { 1 };
        for m in enumerate_compositions(d, j as u32)? {
            let mut l = base + log_multinomial_unchecked(&m);
            for k in 1..d {
                l += tail[k].ln() - (tail[k] + m.tail()[k] as f64).ln();
            }
            out.entries.push(m);
            out.log_abs.push(l);
            out.signs.push(sign);
        }
    }
    Ok(out)
}

/// Truncated, collapsed and normalized series weights `w̃_m(K)`.
pub fn signed_series_weights(p: &GrdParams, k_trunc: usize, config: &SeriesConfig) -> Result<MixtureTable> {
    let t = signed_terms(p, k_trunc, config.cap)?;
    MixtureTable::from_signed_log_weights(t.entries, t.log_abs, t.signs, config.policy)
}

/// The collapsed truncated mixture together with its log-gap law, as used by
/// the approximate sampler.
#[derive(Debug, Clone)]
pub struct SeriesMixture {
    pub r: f64,
    pub k_trunc: usize,
    pub gaps: LogGapMixture,
}

impl SeriesMixture {
    pub fn new(p: &GrdParams, k_trunc: usize, config: &SeriesConfig) -> Result<Self> {
        let table = signed_series_weights(p, k_trunc, config)?;
        Ok(SeriesMixture {
            r: series_exponent(p),
            k_trunc,
            gaps: LogGapMixture::from_table(p, table),
        })
    }

    pub fn table(&self) -> &MixtureTable {
        self.gaps.table()
    }

    pub fn clip_report(&self) -> ClipReport {
        self.table().clip_report()
    }
}

/// `E_a[Π Z_k^{n_k}]` from the series truncated at `k <= K`, normalized by
/// `C = E_{a + r e_1}[Y_1^{-r}]` from [`expected_power_y1_series`].
///
/// Each zero-sum component `GRD(a + m + (r - j) e_1)` has independent
/// `Z_i ~ Exp(ā_i + m̄_i)`, so it contributes `Π n_i! / (ā_i + m̄_i)^{n_i}`
/// on top of its weight. The retained terms are summed in the order of the
/// outer index `k`; regrouping them per composition first gives the same
/// value in exact arithmetic but cancels catastrophically once `K` is large.
/// The inner alternating sums still lose accuracy for large `k`, so the
/// numerator also stops early under the `tol` rule of
/// [`expected_power_y1_series`]; the diagnostics describe its partial sums.
pub fn loggap_moments_series(
    p: &GrdParams,
    n: &[u32],
    k_trunc: usize,
    config: &SeriesConfig,
) -> Result<SeriesValue> {
    if n.len() + 1 != p.dim() {
        return Err(GrdError::LengthMismatch {
            what: "log-gap exponents",
            expected: p.dim() - 1,
            found: n.len(),
        });
    }
    let needed = composition_count(p.dim() + 1, k_trunc as u32);
    if needed > config.cap {
        return Err(GrdError::CapExceeded {
            required: needed,
            cap: config.cap,
        });
    }
    let d = p.dim();
    let tail = p.tail();
    let r = series_exponent(p);
    let numerator = newton_series(d, r, k_trunc, Some(config.tol), |j| {
        let mut acc = LogAccumulator::default();
        for m in enumerate_compositions(d, j)? {
            let mut l = log_multinomial_unchecked(&m);
            for k in 1..d {
                let rate = tail[k] + m.tail()[k] as f64;
                let nk = n[k - 1];
                l += tail[k].ln() - rate.ln() + ln_factorial(nk as u64) - nk as f64 * rate.ln();
            }
            acc.push(l);
        }
        Ok(acc.log_value())
    })?;
    let normalizer = expected_power_y1_series(&p.zero_sum_partner(), r, config)?;
    Ok(SeriesValue {
        value: numerator.value / normalizer.value,
        diagnostics: numerator.diagnostics,
    })
}
