//! `grd`: command-line access to GRD(a) validation, sampling, moments,
//! log-gap laws, calibration and the oracle checks.
//!
//! Results go to standard output as JSON (samples as CSV or JSONL). Errors
//! are a JSON object on standard error; exit codes are listed in
//! [`report`].

mod check;
mod input;
mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use grd_core::oracle::quadrature::{quadrature_expectation, Integrand, DEFAULT_RESOLUTION};
use grd_core::{
    build_sampler, calibrate_first_moment, expected_power_y1_series, loggap_law_zero_sum, loggap_mgf,
    loggap_moments, loggap_moments_series, mean_vector_m1, positive_moments, ratio_moment_zero_sum, sample_batch,
    validate_params, write_csv, write_jsonl, GrdError, GrdParams, GrdRng, OrderedPoint, ParamCase, SamplingMethod,
    GENERATOR_ID,
};
use serde_json::{json, Value};

use crate::input::{integer_vector, load_config, real_vector, ConfigFile};
use crate::report::{CliError, EXIT_CHECK_FAILED, EXIT_OK};

#[derive(Parser)]
#[command(name = "grd", version, about = "Generalized rank Dirichlet distributions on the ordered simplex")]
struct Cli {
    /// JSON file with defaults: {"K": .., "tol": .., "max_k": .., "cap": .., "policy": "clip"|"reject"}
    #[arg(long, global = true)]
    config: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Approx,
    Rejection,
    ZeroSum,
}

impl From<Method> for SamplingMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Exact => SamplingMethod::Exact,
            Method::Approx => SamplingMethod::Approx,
            Method::Rejection => SamplingMethod::Rejection,
            Method::ZeroSum => SamplingMethod::ZeroSum,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the tail-sum condition and classify the parameter case.
    Validate {
        /// Parameter vector as a JSON array, or a path to a file holding one.
        #[arg(long)]
        params: String,
    },
    /// Draw samples; one row of y_1..y_d per draw.
    Sample {
        #[arg(long)]
        params: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to zero-sum, exact or approx according to the case.
        #[arg(long, value_enum)]
        method: Option<Method>,
        /// Truncation for the approximate sampler.
        #[arg(long = "K")]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<String>,
        /// Write the mixture table of the exact or approximate sampler as JSON.
        #[arg(long)]
        dump_table: Option<String>,
    },
    /// Moments of Y.
    Moments {
        #[arg(long)]
        params: String,
        /// Exponents n_1..n_d of Π Y_k^{n_k}.
        #[arg(long)]
        n: Option<String>,
        /// Power of 1/Y_1 (zero-sum parameters; non-integers use the series).
        #[arg(long)]
        inverse_y1: Option<f64>,
        /// All first moments E[Y_k].
        #[arg(long)]
        mean: bool,
    },
    /// Moments or MGF of the log gaps Z_k = ln Y_{k-1} - ln Y_k.
    Loggap {
        #[arg(long)]
        params: String,
        /// Exponents n_2..n_d.
        #[arg(long)]
        moment: Option<String>,
        /// Arguments t_2..t_d.
        #[arg(long)]
        mgf: Option<String>,
        /// Series truncation in the general case.
        #[arg(long = "K")]
        k: Option<usize>,
    },
    /// Parameters with ā_1 = -1 whose mean vector is the target.
    Calibrate {
        #[arg(long)]
        target: String,
    },
    /// Oracle checks. Without --samples runs the built-in quadrature suite;
    /// with --samples compares the sample against the formulas for --params.
    Check {
        #[arg(long)]
        params: Option<String>,
        /// CSV or JSONL sample file, `-` for standard input.
        #[arg(long)]
        samples: Option<String>,
        #[arg(long, default_value_t = 0.001)]
        alpha: f64,
        /// Allowed distance between sample means and predictions, in SE.
        #[arg(long, default_value_t = 4.0)]
        z_max: f64,
        #[arg(long = "K")]
        k: Option<usize>,
    },
}

fn params_from(raw: &str) -> Result<GrdParams, CliError> {
    Ok(validate_params(&real_vector(raw, "--params")?)?)
}

fn case_json(p: &GrdParams) -> Value {
    match p.case() {
        ParamCase::ZeroSum => json!({ "case": "zero-sum" }),
        ParamCase::NegativeIntegerSum { m } => json!({ "case": "negative-integer-sum", "M": m }),
        ParamCase::General { r } => json!({ "case": "general", "r": r }),
    }
}

fn merge(mut base: Value, more: Value) -> Value {
    if let (Some(b), Value::Object(m)) = (base.as_object_mut(), more) {
        b.extend(m);
    }
    base
}

fn print_json(v: &Value) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(|e| CliError::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

fn cmd_validate(raw: &str) -> Result<u8, CliError> {
    let a = real_vector(raw, "--params")?;
    match validate_params(&a) {
        Ok(p) => {
            let report = merge(
                json!({ "valid": true, "a": p.a(), "d": p.dim(), "tail_sums": p.tail(), "total": p.total() }),
                case_json(&p),
            );
            print_json(&report)?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            let err = CliError::Grd(e);
            print_json(&json!({ "valid": false, "a": a, "error": err.to_json() }))?;
            Ok(err.exit_code())
        }
    }
}

fn open_output(path: Option<&str>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::malformed(format!("cannot create `{p}`: {e}")))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    config: &ConfigFile,
    raw: &str,
    n: usize,
    seed: u64,
    method: Option<Method>,
    k: Option<usize>,
    format: Format,
    out: Option<&str>,
    dump_table: Option<&str>,
) -> Result<u8, CliError> {
    let p = params_from(raw)?;
    if n == 0 {
        return Err(GrdError::InvalidArgument("--n must be at least 1".into()).into());
    }
    let cfg = config.series()?;
    let k = k.unwrap_or(cfg.sample_k);
    let method = match method {
        Some(m) => m.into(),
        None => match p.case() {
            ParamCase::ZeroSum => SamplingMethod::ZeroSum,
            ParamCase::NegativeIntegerSum { .. } => SamplingMethod::Exact,
            ParamCase::General { .. } => SamplingMethod::Approx,
        },
    };
    let sampler = build_sampler(&p, method, k, &cfg)?;

    let mut diagnostics = json!({ "method": method.name(), "seed": seed, "n": n, "generator": GENERATOR_ID });
    if method == SamplingMethod::Approx {
        diagnostics["K"] = json!(k);
    }
    if let Some(table) = sampler.table() {
        diagnostics["clipped"] = json!(table.clip_report());
        if let Some(path) = dump_table {
            let f = File::create(path).map_err(|e| CliError::malformed(format!("cannot create `{path}`: {e}")))?;
            serde_json::to_writer_pretty(BufWriter::new(f), &json!({ "method": method.name(), "table": table }))
                .map_err(|e| CliError::Io(e.into()))?;
        }
    } else if dump_table.is_some() {
        return Err(CliError::malformed("--dump-table needs --method exact or approx"));
    }

    let batch = sample_batch(sampler.as_ref(), n, &mut GrdRng::seed_from_u64(seed));
    if method == SamplingMethod::Rejection {
        diagnostics["proposals"] = json!(batch.proposals);
        diagnostics["acceptance_rate"] = json!(n as f64 / batch.proposals as f64);
    }
    let mut w = open_output(out)?;
    match format {
        Format::Csv => write_csv(&batch, &mut w)?,
        Format::Jsonl => write_jsonl(&batch, &mut w)?,
    }
    w.flush()?;
    eprintln!("{diagnostics}");
    Ok(EXIT_OK)
}

fn cmd_moments(raw: &str, n: Option<&str>, inverse_y1: Option<f64>, mean: bool, config: &ConfigFile) -> Result<u8, CliError> {
    let p = params_from(raw)?;
    let d = p.dim();
    let n = n.map(|s| integer_vector(s, "--n")).transpose()?;
    let base = merge(json!({ "a": p.a() }), case_json(&p));
    let quad = |n: &[u32]| -> Result<f64, CliError> {
        Ok(quadrature_expectation(p.a(), &Integrand::Monomial(n.to_vec()), DEFAULT_RESOLUTION)?.value)
    };
    let unit = |k: usize| -> Vec<u32> {
        let mut e = vec![0; d];
        e[k] = 1;
        e
    };

    // closed forms where they exist, quadrature (d <= 3) otherwise
    let monomial = |n: &[u32]| -> Result<(f64, &'static str), CliError> {
        if n.len() != d {
            return Err(GrdError::LengthMismatch { what: "moment exponents", expected: d, found: n.len() }.into());
        }
        match p.case() {
            ParamCase::NegativeIntegerSum { .. } => Ok((positive_moments(&p, n)?, "exact")),
            ParamCase::ZeroSum if n.iter().all(|&e| e == 0) => Ok((1.0, "exact")),
            _ => Ok((quad(n)?, "oracle-quadrature")),
        }
    };

    let report = if mean {
        let (values, provenance) = if let ParamCase::NegativeIntegerSum { m: 1 } = p.case() {
            (mean_vector_m1(&p)?, "exact")
        } else {
            let mut values = Vec::with_capacity(d);
            let mut provenance = "exact";
            for k in 0..d {
                let (v, prov) = monomial(&unit(k))?;
                values.push(v);
                provenance = prov;
            }
            (values, provenance)
        };
        json!({ "moment": "mean", "values": values, "provenance": provenance })
    } else if let Some(s) = inverse_y1 {
        p.is_zero_sum()
            .then_some(())
            .ok_or(GrdError::NotZeroSum { total: p.total() })?;
        let exps = n.clone().unwrap_or_else(|| vec![0; d]);
        let integer = s >= 0.0 && s.fract() == 0.0;
        if integer {
            let v = ratio_moment_zero_sum(&p, &exps, s as u32)?;
            json!({ "moment": "ratio", "n": exps, "inverse_y1": s, "value": v, "provenance": "exact" })
        } else {
            if exps.iter().any(|&e| e != 0) {
                return Err(GrdError::InvalidArgument("non-integer --inverse-y1 cannot be combined with --n".into()).into());
            }
            let cfg = config.series()?;
            let v = expected_power_y1_series(&p, s, &cfg)?;
            json!({ "moment": "inverse_y1", "inverse_y1": s, "value": v.value, "provenance": "series", "diagnostics": v.diagnostics })
        }
    } else if let Some(n) = n {
        let (v, provenance) = monomial(&n)?;
        json!({ "moment": "monomial", "n": n, "value": v, "provenance": provenance })
    } else {
        return Err(CliError::malformed("moments needs one of --n, --inverse-y1, --mean"));
    };
    print_json(&merge(base, report))?;
    Ok(EXIT_OK)
}

fn cmd_loggap(raw: &str, moment: Option<&str>, mgf: Option<&str>, k: Option<usize>, config: &ConfigFile) -> Result<u8, CliError> {
    let p = params_from(raw)?;
    let base = merge(json!({ "a": p.a() }), case_json(&p));
    let cfg = config.series()?;
    let report = match (moment, mgf) {
        (Some(m), None) => {
            let n = integer_vector(m, "--moment")?;
            match p.case() {
                ParamCase::ZeroSum => {
                    let rates = loggap_law_zero_sum(&p)?;
                    if n.len() != rates.len() {
                        return Err(GrdError::LengthMismatch { what: "log-gap exponents", expected: rates.len(), found: n.len() }.into());
                    }
                    let v: f64 = n
                        .iter()
                        .zip(&rates)
                        .map(|(&e, r)| (1..=e).map(f64::from).product::<f64>() / r.powi(e as i32))
                        .product();
                    json!({ "moment": n, "value": v, "provenance": "exact" })
                }
                ParamCase::NegativeIntegerSum { .. } => {
                    json!({ "moment": n, "value": loggap_moments(&p, &n)?, "provenance": "exact" })
                }
                ParamCase::General { .. } => {
                    let k = k.unwrap_or(cfg.sample_k);
                    let v = loggap_moments_series(&p, &n, k, &cfg)?;
                    json!({ "moment": n, "value": v.value, "K": k, "provenance": "series", "diagnostics": v.diagnostics })
                }
            }
        }
        (None, Some(t)) => {
            let t = real_vector(t, "--mgf")?;
            let v = if p.is_zero_sum() {
                let rates = loggap_law_zero_sum(&p)?;
                if t.len() != rates.len() {
                    return Err(GrdError::LengthMismatch { what: "MGF argument", expected: rates.len(), found: t.len() }.into());
                }
                if let Some(i) = t.iter().zip(&rates).position(|(t, r)| !(t < r)) {
                    return Err(GrdError::MgfDomainViolation { k: i + 2, t: t[i], rate: rates[i] }.into());
                }
                t.iter().zip(&rates).map(|(t, r)| r / (r - t)).product()
            } else {
                loggap_mgf(&p, &t)?
            };
            json!({ "mgf": t, "value": v, "provenance": "exact" })
        }
        _ => return Err(CliError::malformed("loggap needs exactly one of --moment, --mgf")),
    };
    print_json(&merge(base, report))?;
    Ok(EXIT_OK)
}

fn cmd_calibrate(raw: &str) -> Result<u8, CliError> {
    let target = OrderedPoint::new(real_vector(raw, "--target")?)?;
    let p = calibrate_first_moment(&target)?;
    print_json(&json!({ "a": p.a(), "target": target.as_slice(), "provenance": "exact" }))?;
    Ok(EXIT_OK)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Validate { params } => cmd_validate(&params),
        Command::Sample {
            params,
            n,
            seed,
            method,
            k,
            format,
            out,
            dump_table,
        } => cmd_sample(&config, &params, n, seed, method, k, format, out.as_deref(), dump_table.as_deref()),
        Command::Moments {
            params,
            n,
            inverse_y1,
            mean,
        } => cmd_moments(&params, n.as_deref(), inverse_y1, mean, &config),
        Command::Loggap { params, moment, mgf, k } => cmd_loggap(&params, moment.as_deref(), mgf.as_deref(), k, &config),
        Command::Calibrate { target } => cmd_calibrate(&target),
        Command::Check {
            params,
            samples,
            alpha,
            z_max,
            k,
        } => {
            let report = match (params, samples) {
                (None, None) => check::oracle_suite(),
                (Some(p), None) => check::oracle_suite_for(&params_from(&p)?),
                (Some(p), Some(s)) => {
                    let cfg = config.series()?;
                    check::sample_check(&params_from(&p)?, &s, alpha, z_max, k.unwrap_or(cfg.sample_k), &cfg)?
                }
                (None, Some(_)) => return Err(CliError::malformed("--samples needs --params")),
            };
            let pass = report["pass"].as_bool().unwrap_or(false);
            print_json(&report)?;
            Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        // a closed downstream pipe (`grd sample ... | head`) is not an error
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            eprintln!("{}", json!({ "error": e.to_json() }));
            ExitCode::from(code)
        }
    }
}
