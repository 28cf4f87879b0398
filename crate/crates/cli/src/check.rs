//! `grd check`: formulas against quadrature, and samples against formulas.

use grd_core::oracle::ks::ks_test;
use grd_core::oracle::quadrature::{quadrature_expectation, Integrand, DEFAULT_RESOLUTION};
use grd_core::oracle::{mc_statistic, Statistic};
use grd_core::{
    expected_power_y1_series, loggap_law_zero_sum, loggap_moments, loggap_moments_series, mean_vector_m1,
    negative_moment_y1, positive_moments, validate_params, GrdParams, LogGapMixture, ParamCase, Result,
    SampleBatch, SeriesConfig,
};
use serde_json::{json, Value};

use crate::input::read_samples;
use crate::report::CliError;

const EXACT_TOL: f64 = 1e-7;
const SERIES_TOL: f64 = 1e-6;
const SERIES_K: usize = 40;

fn unit(len: usize, k: usize) -> Vec<u32> {
    let mut e = vec![0; len];
    e[k] = 1;
    e
}

fn compare(name: String, value: Result<f64>, a: &[f64], g: Integrand, tol: f64) -> Value {
    let reference = quadrature_expectation(a, &g, DEFAULT_RESOLUTION);
    match (value, reference) {
        (Ok(v), Ok(q)) => {
            let rel = ((v - q.value) / q.value).abs();
            json!({ "name": name, "a": a, "value": v, "reference": q.value,
                    "rel_error": rel, "tol": tol, "pass": rel <= tol })
        }
        (v, q) => {
            let err = v.err().or(q.err()).map(|e| e.to_string());
            json!({ "name": name, "a": a, "error": err, "pass": false })
        }
    }
}

fn summarize(checks: Vec<Value>) -> Value {
    let pass = checks.iter().all(|c| c["pass"] == true);
    json!({ "pass": pass, "checks": checks })
}

fn checks_for(p: &GrdParams) -> Vec<Value> {
    let a = p.a();
    let d = p.dim();
    let mut out = Vec::new();
    match p.case() {
        ParamCase::ZeroSum => {
            out.push(compare("E[1/Y_1]".into(), negative_moment_y1(p, 1), a, Integrand::InversePowerY1(1.0), EXACT_TOL));
            if let Ok(rates) = loggap_law_zero_sum(p) {
                for k in 0..d - 1 {
                    out.push(compare(
                        format!("E[Z_{}]", k + 2),
                        Ok(1.0 / rates[k]),
                        a,
                        Integrand::LogGapMonomial(unit(d - 1, k)),
                        EXACT_TOL,
                    ));
                }
            }
        }
        ParamCase::NegativeIntegerSum { .. } => {
            for k in 0..d {
                let n = unit(d, k);
                out.push(compare(format!("E[Y_{}]", k + 1), positive_moments(p, &n), a, Integrand::Monomial(n), EXACT_TOL));
            }
            for k in 0..d - 1 {
                let n = unit(d - 1, k);
                out.push(compare(format!("E[Z_{}]", k + 2), loggap_moments(p, &n), a, Integrand::LogGapMonomial(n), EXACT_TOL));
            }
        }
        ParamCase::General { .. } => {
            let cfg = SeriesConfig::default();
            for k in 0..d - 1 {
                let n = unit(d - 1, k);
                let v = loggap_moments_series(p, &n, SERIES_K, &cfg).map(|s| s.value);
                out.push(compare(format!("E[Z_{}] (series)", k + 2), v, a, Integrand::LogGapMonomial(n), SERIES_TOL));
            }
        }
    }
    out
}

/// Fixed set of closed forms and series checked against quadrature.
pub fn oracle_suite() -> Value {
    let mut checks = Vec::new();
    for a in [vec![-3.0, 2.0], vec![-4.0, 1.0, 1.0], vec![-5.0, 2.0, 3.0], vec![-1.5, 1.0], vec![-2.0, 0.3, 0.2]] {
        checks.extend(checks_for(&validate_params(&a).expect("suite parameters are valid")));
    }
    let m1 = validate_params(&[-2.0, 0.5, 0.5]).expect("valid");
    if let Ok(means) = mean_vector_m1(&m1) {
        for (k, v) in means.into_iter().enumerate() {
            checks.push(compare(format!("mean vector, E[Y_{}]", k + 1), Ok(v), m1.a(), Integrand::Monomial(unit(3, k)), EXACT_TOL));
        }
    }
    let zs = validate_params(&[-1.0, 1.0]).expect("valid");
    let v = expected_power_y1_series(&zs, 0.5, &SeriesConfig::default()).map(|s| s.value);
    checks.push(compare("E[Y_1^-0.5] (series)".into(), v, zs.a(), Integrand::InversePowerY1(0.5), SERIES_TOL));
    summarize(checks)
}

/// Quadrature checks for one parameter vector (`d <= 3`).
pub fn oracle_suite_for(p: &GrdParams) -> Value {
    summarize(checks_for(p))
}

fn mean_check(batch: &SampleBatch, name: String, stat: Statistic, predicted: Result<f64>, z_max: f64) -> Value {
    match (mc_statistic(batch, &stat), predicted) {
        (Ok(e), Ok(v)) => {
            let z = e.z_to(v);
            json!({ "name": name, "sample_mean": e.mean, "se": e.se, "predicted": v, "z": z, "z_max": z_max, "pass": z <= z_max })
        }
        (e, v) => {
            let err = e.err().or(v.err()).map(|e| e.to_string());
            json!({ "name": name, "error": err, "pass": false })
        }
    }
}

fn ks_check(name: String, samples: &[f64], cdf: impl Fn(f64) -> f64, alpha: f64) -> Value {
    match ks_test(samples, cdf, alpha) {
        Ok(r) => json!({ "name": name, "ks": r, "pass": r.pass }),
        Err(e) => json!({ "name": name, "error": e.to_string(), "pass": false }),
    }
}

/// Sample means against exact or series predictions, and KS tests of the
/// log gaps where the law is known.
pub fn sample_check(
    p: &GrdParams,
    path: &str,
    alpha: f64,
    z_max: f64,
    k_trunc: usize,
    cfg: &SeriesConfig,
) -> std::result::Result<Value, CliError> {
    let rows = read_samples(path)?;
    let batch = SampleBatch::from_rows(&rows)?;
    let d = p.dim();
    if batch.dim() != d {
        return Err(grd_core::GrdError::LengthMismatch {
            what: "sample rows",
            expected: d,
            found: batch.dim(),
        }
        .into());
    }
    let mut checks = Vec::new();
    match p.case() {
        ParamCase::ZeroSum => {
            checks.push(mean_check(&batch, "E[1/Y_1]".into(), Statistic::InverseY1(1.0), negative_moment_y1(p, 1), z_max));
            let rates = loggap_law_zero_sum(p)?;
            for (k, &rate) in rates.iter().enumerate() {
                checks.push(mean_check(&batch, format!("E[Z_{}]", k + 2), Statistic::Z(k + 2), Ok(1.0 / rate), z_max));
                checks.push(ks_check(format!("Z_{} ~ Exp({rate})", k + 2), &batch.z[k], |z| -(-rate * z.max(0.0)).exp_m1(), alpha));
            }
        }
        ParamCase::NegativeIntegerSum { .. } => {
            for k in 0..d {
                checks.push(mean_check(&batch, format!("E[Y_{}]", k + 1), Statistic::Y(k + 1), positive_moments(p, &unit(d, k)), z_max));
            }
            let mixture = LogGapMixture::new(p)?;
            for k in 2..=d {
                checks.push(mean_check(&batch, format!("E[Z_{k}]"), Statistic::Z(k), Ok(mixture.marginal_mean(k)), z_max));
                checks.push(ks_check(format!("Z_{k} mixture law"), &batch.z[k - 2], |z| mixture.marginal_cdf(k, z), alpha));
            }
        }
        ParamCase::General { .. } => {
            for k in 0..d - 1 {
                let v = loggap_moments_series(p, &unit(d - 1, k), k_trunc, cfg).map(|s| s.value);
                checks.push(mean_check(&batch, format!("E[Z_{}] (series, K = {k_trunc})", k + 2), Statistic::Z(k + 2), v, z_max));
            }
        }
    }
    let mut report = summarize(checks);
    report["a"] = json!(p.a());
    report["n"] = json!(batch.len());
    Ok(report)
}
