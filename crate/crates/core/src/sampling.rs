//! Random-variate generation.
//!
//! All samplers draw the log gaps first and map them to the simplex with
//! [`LogGapVector::to_point`]:
//!
//! * [`ZeroSumSampler`]: `ā_1 = 0`, independent `Z_k ~ Exp(ā_k)`.
//! * [`MixtureSampler::exact`]: `ā_1 = -M`; pick `m` with probability `w_m`,
//!   then `Z_k ~ Exp(ā_k + m̄_k)`. Exact.
//! * [`MixtureSampler::approximate`]: any `ā_1`; same steps with the
//!   truncated series weights `w̃_m(K)`. Approximate.
//! * [`RejectionSampler`]: any `ā_1`; proposes from GRD(a - ā_1 e_1) and
//!   accepts with probability `Y_1^{ā_1} / B`, where `B = d^{-ā_1}` for
//!   `ā_1 < 0` and `B = 1` otherwise. Exact, and independent of the mixture
//!   formulas, which makes it the reference for the other two.

use std::io::{self, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::compositions::{ClipReport, MixtureTable};
use crate::error::{GrdError, Result};
use crate::mixture::{mixture_weights, LogGapMixture, LogGapVector};
use crate::params::{GrdParams, OrderedPoint, ParamCase};
use crate::rng::GrdRng;
use crate::series::{SeriesConfig, SeriesMixture};

/// One variate together with the log gaps it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Draw {
    pub point: OrderedPoint,
    pub gaps: LogGapVector,
    /// Proposals consumed; 1 except for the rejection sampler.
    pub proposals: u64,
}

pub trait GrdSampler {
    fn dim(&self) -> usize;
    fn draw(&self, rng: &mut GrdRng) -> Draw;

    /// The composition table behind a mixture sampler.
    fn table(&self) -> Option<&MixtureTable> {
        None
    }
}

fn draw_gaps(rates: &[f64], rng: &mut GrdRng) -> Draw {
    let z: Vec<f64> = rates.iter().map(|&r| rng.exponential(r)).collect();
    let gaps = LogGapVector::new(z).expect("exponential draws are nonnegative");
    Draw {
        point: gaps.to_point(),
        gaps,
        proposals: 1,
    }
}

#[derive(Debug, Clone)]
pub struct ZeroSumSampler {
    rates: Vec<f64>,
}

impl ZeroSumSampler {
    pub fn new(p: &GrdParams) -> Result<Self> {
        p.require_zero_sum()?;
        Ok(ZeroSumSampler {
            rates: p.gap_rates().to_vec(),
        })
    }
}

impl GrdSampler for ZeroSumSampler {
    fn dim(&self) -> usize {
        self.rates.len() + 1
    }

    fn draw(&self, rng: &mut GrdRng) -> Draw {
        draw_gaps(&self.rates, rng)
    }
}

/// Samples a composition from a table, then the log gaps of that component.
#[derive(Debug, Clone)]
pub struct MixtureSampler {
    mixture: LogGapMixture,
    dim: usize,
}

impl MixtureSampler {
    fn from_mixture(p: &GrdParams, mixture: LogGapMixture) -> Self {
        MixtureSampler { mixture, dim: p.dim() }
    }

    /// Algorithm for `ā_1 = -M`: exact.
    pub fn exact(p: &GrdParams) -> Result<Self> {
        let table = mixture_weights(p)?;
        Ok(Self::from_mixture(p, LogGapMixture::from_table(p, table)))
    }

    /// Truncated-series algorithm for general `ā_1`: approximate.
    pub fn approximate(p: &GrdParams, k_trunc: usize, config: &SeriesConfig) -> Result<Self> {
        let series = SeriesMixture::new(p, k_trunc, config)?;
        Ok(Self::from_mixture(p, series.gaps))
    }

    pub fn mixture(&self) -> &LogGapMixture {
        &self.mixture
    }

    pub fn clip_report(&self) -> ClipReport {
        self.mixture.table().clip_report()
    }
}

impl GrdSampler for MixtureSampler {
    fn dim(&self) -> usize {
        self.dim
    }

    fn draw(&self, rng: &mut GrdRng) -> Draw {
        let idx = self.mixture.table().index_for(rng.uniform());
        draw_gaps(&self.mixture.rates()[idx], rng)
    }

    fn table(&self) -> Option<&MixtureTable> {
        Some(self.mixture.table())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RejectionStats {
    pub proposals: u64,
    pub accepted: u64,
}

impl RejectionStats {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.proposals as f64
    }

    /// Expected proposals per accepted draw, estimated from the counts.
    pub fn mean_iterations(&self) -> f64 {
        self.proposals as f64 / self.accepted as f64
    }
}

#[derive(Debug, Clone)]
pub struct RejectionSampler {
    proposal: ZeroSumSampler,
    total: f64,
    log_bound: f64,
}

impl RejectionSampler {
    pub fn new(p: &GrdParams) -> Result<Self> {
        let total = p.total();
        let log_bound = if total < 0.0 {
            -total * (p.dim() as f64).ln()
        } else {
            0.0
        };
        Ok(RejectionSampler {
            proposal: ZeroSumSampler::new(&p.zero_sum_partner())?,
            total,
            log_bound,
        })
    }

    /// Acceptance probability `Y_1^{ā_1} / B` of a proposed point.
    pub fn acceptance_probability(&self, y1: f64) -> f64 {
        (self.total * y1.ln() - self.log_bound).exp()
    }
}

impl GrdSampler for RejectionSampler {
    fn dim(&self) -> usize {
        self.proposal.dim()
    }

    fn draw(&self, rng: &mut GrdRng) -> Draw {
        let mut proposals = 0;
        loop {
            let mut d = self.proposal.draw(rng);
            proposals += 1;
            if self.total == 0.0 || rng.uniform() < self.acceptance_probability(d.point.as_slice()[0]) {
                d.proposals = proposals;
                return d;
            }
        }
    }
}

/// Draws one variate from GRD(a) with `ā_1 = 0`.
pub fn sample_zero_sum(p: &GrdParams, rng: &mut GrdRng) -> Result<OrderedPoint> {
    Ok(ZeroSumSampler::new(p)?.draw(rng).point)
}

/// One exact draw when `ā_1 = -M`. Builds the weight table on every call;
/// use [`MixtureSampler::exact`] for repeated draws.
pub fn sample_exact_negative_integer(p: &GrdParams, rng: &mut GrdRng) -> Result<OrderedPoint> {
    Ok(MixtureSampler::exact(p)?.draw(rng).point)
}

/// One approximate draw with truncation `K`, plus the clipping report of the
/// table it came from.
pub fn sample_approximate_general(
    p: &GrdParams,
    k_trunc: usize,
    rng: &mut GrdRng,
) -> Result<(OrderedPoint, ClipReport)> {
    let s = MixtureSampler::approximate(p, k_trunc, &SeriesConfig::default())?;
    Ok((s.draw(rng).point, s.clip_report()))
}

pub fn sample_rejection_oracle(p: &GrdParams, rng: &mut GrdRng) -> Result<(OrderedPoint, RejectionStats)> {
    let d = RejectionSampler::new(p)?.draw(rng);
    Ok((
        d.point,
        RejectionStats {
            proposals: d.proposals,
            accepted: 1,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMethod {
    Exact,
    Approx,
    Rejection,
    ZeroSum,
}

impl SamplingMethod {
    pub fn name(self) -> &'static str {
        match self {
            SamplingMethod::Exact => "exact",
            SamplingMethod::Approx => "approx",
            SamplingMethod::Rejection => "rejection",
            SamplingMethod::ZeroSum => "zero-sum",
        }
    }
}

impl FromStr for SamplingMethod {
    type Err = GrdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SamplingMethod::Exact),
            "approx" => Ok(SamplingMethod::Approx),
            "rejection" => Ok(SamplingMethod::Rejection),
            "zero-sum" => Ok(SamplingMethod::ZeroSum),
            other => Err(GrdError::InvalidArgument(format!("unknown sampling method `{other}`"))),
        }
    }
}

fn case_name(case: ParamCase) -> String {
    match case {
        ParamCase::ZeroSum => "zero-sum".into(),
        ParamCase::NegativeIntegerSum { m } => format!("negative-integer-sum (M = {m})"),
        ParamCase::General { r } => format!("general (r = {r})"),
    }
}

/// Builds the sampler for `method`, refusing combinations the parameter case
/// does not support.
pub fn build_sampler(
    p: &GrdParams,
    method: SamplingMethod,
    k_trunc: usize,
    config: &SeriesConfig,
) -> Result<Box<dyn GrdSampler + Send + Sync>> {
    let case = p.case();
    let mismatch = || GrdError::MethodCaseMismatch {
        method: method.name().into(),
        case: case_name(case),
    };
    Ok(match method {
        SamplingMethod::Exact => match case {
            ParamCase::NegativeIntegerSum { .. } => Box::new(MixtureSampler::exact(p)?),
            _ => return Err(mismatch()),
        },
        SamplingMethod::ZeroSum => match case {
            ParamCase::ZeroSum => Box::new(ZeroSumSampler::new(p)?),
            _ => return Err(mismatch()),
        },
        SamplingMethod::Approx => Box::new(MixtureSampler::approximate(p, k_trunc, config)?),
        SamplingMethod::Rejection => Box::new(RejectionSampler::new(p)?),
    })
}

/// Columnar draws: `y[k][i]` is coordinate `k` of draw `i`, `z[k][i]` the
/// log gap `Z_{k+2}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleBatch {
    pub y: Vec<Vec<f64>>,
    pub z: Vec<Vec<f64>>,
    pub proposals: u64,
}

impl SampleBatch {
    pub fn with_dim(d: usize, capacity: usize) -> Self {
        SampleBatch {
            y: (0..d).map(|_| Vec::with_capacity(capacity)).collect(),
            z: (0..d - 1).map(|_| Vec::with_capacity(capacity)).collect(),
            proposals: 0,
        }
    }

    pub fn push(&mut self, draw: &Draw) {
        for (col, v) in self.y.iter_mut().zip(draw.point.as_slice()) {
            col.push(*v);
        }
        for (col, v) in self.z.iter_mut().zip(draw.gaps.as_slice()) {
            col.push(*v);
        }
        self.proposals += draw.proposals;
    }

    pub fn dim(&self) -> usize {
        self.y.len()
    }

    pub fn len(&self) -> usize {
        self.y.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.y.iter().map(|c| c[i]).collect()
    }

    /// Rebuilds a batch from rows of `y`, recomputing the log gaps.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if d < 2 {
            return Err(GrdError::DimensionTooSmall { d });
        }
        let mut batch = SampleBatch::with_dim(d, rows.len());
        for row in rows {
            let point = OrderedPoint::new(row.clone())?;
            let gaps = point.log_gaps();
            batch.push(&Draw {
                point,
                gaps,
                proposals: 1,
            });
        }
        Ok(batch)
    }
}

pub fn sample_batch(sampler: &dyn GrdSampler, n: usize, rng: &mut GrdRng) -> SampleBatch {
    let mut batch = SampleBatch::with_dim(sampler.dim(), n);
    for _ in 0..n {
        batch.push(&sampler.draw(rng));
    }
    batch
}

/// CSV with header `y1,...,yd`. Values use Rust's shortest round-trip
/// formatting, so output is byte-stable for a given seed.
pub fn write_csv<W: Write>(batch: &SampleBatch, out: &mut W) -> io::Result<()> {
    let header: Vec<String> = (1..=batch.dim()).map(|k| format!("y{k}")).collect();
    writeln!(out, "{}", header.join(","))?;
    for i in 0..batch.len() {
        let row: Vec<String> = batch.y.iter().map(|c| format!("{:?}", c[i])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// One JSON array per line.
pub fn write_jsonl<W: Write>(batch: &SampleBatch, out: &mut W) -> io::Result<()> {
    for i in 0..batch.len() {
        let row: Vec<String> = batch.y.iter().map(|c| format!("{:?}", c[i])).collect();
        writeln!(out, "[{}]", row.join(","))?;
    }
    Ok(())
}
