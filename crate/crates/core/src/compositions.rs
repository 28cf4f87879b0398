//! Weak compositions `ℕ₀^d(M)` and discrete mixture tables over them.
//!
//! Compositions are enumerated in reverse-lexicographic order: for `d = 3`
//! and `M = 2` the sequence is `200, 110, 101, 020, 011, 002`. This order is
//! part of the public contract, since weight tables and their cumulative
//! arrays are indexed by it.

use serde::Serialize;
use statrs::function::factorial::ln_factorial;

use crate::error::{GrdError, Result};
use crate::logspace::SignedLogAccumulator;
use crate::rng::GrdRng;

/// Default upper bound on the number of compositions a single enumeration
/// may produce.
pub const DEFAULT_COMPOSITION_CAP: u128 = 10_000_000;

/// A weak composition `m` with cached tail sums `m̄_k = m_k + ... + m_d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Composition {
    m: Vec<u32>,
    #[serde(skip)]
    tail: Vec<u32>,
}

impl Composition {
    pub fn new(m: Vec<u32>) -> Self {
        let mut tail = vec![0u32; m.len()];
        let mut acc = 0u32;
        for k in (0..m.len()).rev() {
            acc += m[k];
            tail[k] = acc;
        }
        Composition { m, tail }
    }

    pub fn parts(&self) -> &[u32] {
        &self.m
    }

    pub fn tail(&self) -> &[u32] {
        &self.tail
    }

    pub fn total(&self) -> u32 {
        self.tail.first().copied().unwrap_or(0)
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }
}

/// `C(M + d - 1, d - 1)`, saturating at `u128::MAX`.
pub fn composition_count(d: usize, total: u32) -> u128 {
    if d == 0 {
        return u128::from(total == 0);
    }
    let n = total as u128 + d as u128 - 1;
    let k = (d as u128 - 1).min(total as u128);
    let mut c: u128 = 1;
    for i in 0..k {
        // c * (n - i) / (i + 1) stays integral at every step
        c = match c.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    c
}

/// Lazy reverse-lexicographic enumeration of `ℕ₀^d(M)`.
#[derive(Debug, Clone)]
pub struct Compositions {
    next: Option<Vec<u32>>,
    remaining: u128,
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        let current = self.next.take()?;
        self.remaining -= 1;
        let d = current.len();
        // Rightmost non-final position with a positive part; move one unit
        // from it to the position after, gathering the remainder there.
        if let Some(i) = (0..d.saturating_sub(1)).rev().find(|&i| current[i] > 0) {
            let mut succ = current.clone();
            let rest: u32 = succ[i + 1..].iter().sum();
            succ[i] -= 1;
            succ[i + 1] = rest + 1;
            succ[i + 2..].iter_mut().for_each(|x| *x = 0);
            self.next = Some(succ);
        }
        Some(Composition::new(current))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}

pub fn enumerate_compositions(d: usize, total: u32) -> Result<Compositions> {
    enumerate_compositions_with_cap(d, total, DEFAULT_COMPOSITION_CAP)
}

pub fn enumerate_compositions_with_cap(d: usize, total: u32, cap: u128) -> Result<Compositions> {
    if d == 0 {
        return Err(GrdError::InvalidArgument(
            "compositions need at least one part".into(),
        ));
    }
    let count = composition_count(d, total);
    if count > cap {
        return Err(GrdError::CapExceeded {
            required: count,
            cap,
        });
    }
    let mut first = vec![0u32; d];
    first[0] = total;
    Ok(Compositions {
        next: Some(first),
        remaining: count,
    })
}

/// `log (M choose m_1, ..., m_d)`.
pub fn log_multinomial(total: u32, m: &Composition) -> Result<f64> {
    if m.total() != total {
        return Err(GrdError::MismatchedTotal {
            expected: total as u64,
            found: m.total() as u64,
        });
    }
    Ok(log_multinomial_unchecked(m))
}

pub(crate) fn log_multinomial_unchecked(m: &Composition) -> f64 {
    ln_factorial(m.total() as u64) - m.parts().iter().map(|&x| ln_factorial(x as u64)).sum::<f64>()
}

/// What to do with entries that come out negative after normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativeWeightPolicy {
    /// Set negative weights to zero, renormalize, and report the clipped mass.
    #[default]
    Clip,
    /// Fail with [`GrdError::NegativeTruncatedWeight`] below `-1e-12`.
    Reject,
}

/// Threshold below which a normalized weight counts as genuinely negative.
pub const NEGATIVE_WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ClipReport {
    /// Entries whose normalized weight was negative.
    pub count: usize,
    /// Total absolute normalized weight removed.
    pub mass: f64,
    /// Most negative normalized weight seen.
    pub most_negative: f64,
}

/// A discrete law over compositions: unnormalized weights in log magnitude
/// plus sign, the normalized probabilities, and a cumulative array for
/// inverse-CDF sampling.
#[derive(Debug, Clone, Serialize)]
pub struct MixtureTable {
    entries: Vec<Composition>,
    log_weight_abs: Vec<f64>,
    sign: Vec<i8>,
    weights: Vec<f64>,
    #[serde(skip)]
    cumulative: Vec<f64>,
    clipped: ClipReport,
}

impl MixtureTable {
    /// Builds a table from unnormalized signed weights `sign · exp(log_abs)`.
    pub fn from_signed_log_weights(
        entries: Vec<Composition>,
        log_weight_abs: Vec<f64>,
        sign: Vec<i8>,
        policy: NegativeWeightPolicy,
    ) -> Result<Self> {
        assert_eq!(entries.len(), log_weight_abs.len());
        assert_eq!(entries.len(), sign.len());
        let mut acc = SignedLogAccumulator::default();
        for (&l, &s) in log_weight_abs.iter().zip(&sign) {
            acc.push(l, s < 0);
        }
        let log_pos = acc.log_positive();
        // total = exp(log_pos) · (1 - exp(log_neg - log_pos))
        let ratio = (acc.log_negative() - log_pos).exp();
        if !log_pos.is_finite() || ratio >= 1.0 {
            return Err(GrdError::DegenerateWeights { total: acc.value() });
        }
        let scale = 1.0 - ratio;
        let mut weights: Vec<f64> = log_weight_abs
            .iter()
            .zip(&sign)
            .map(|(&l, &s)| f64::from(s) * (l - log_pos).exp() / scale)
            .collect();

        let mut clipped = ClipReport::default();
        for (i, w) in weights.iter_mut().enumerate() {
            if *w < 0.0 {
                if policy == NegativeWeightPolicy::Reject && *w < -NEGATIVE_WEIGHT_TOL {
                    return Err(GrdError::NegativeTruncatedWeight {
                        composition: entries[i].parts().to_vec(),
                        weight: *w,
                    });
                }
                clipped.count += 1;
                clipped.mass += -*w;
                clipped.most_negative = clipped.most_negative.min(*w);
                *w = 0.0;
            }
        }
        if clipped.count > 0 {
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
        }

        let mut cumulative = Vec::with_capacity(weights.len());
        let mut running = 0.0;
        for w in &weights {
            running += w;
            cumulative.push(running);
        }
        let end = running;
        cumulative.iter_mut().for_each(|c| *c /= end);
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }

        Ok(MixtureTable {
            entries,
            log_weight_abs,
            sign,
            weights,
            cumulative,
            clipped,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Composition] {
        &self.entries
    }

    /// Normalized probabilities (after any clipping).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn signs(&self) -> &[i8] {
        &self.sign
    }

    pub fn log_weight_abs(&self) -> &[f64] {
        &self.log_weight_abs
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn clip_report(&self) -> ClipReport {
        self.clipped
    }

    pub fn all_positive(&self) -> bool {
        self.sign.iter().all(|&s| s > 0)
    }

    /// Weight of composition `m`, or zero when `m` is absent.
    pub fn weight_of(&self, m: &[u32]) -> f64 {
        self.entries
            .iter()
            .position(|c| c.parts() == m)
            .map_or(0.0, |i| self.weights[i])
    }

    /// Index of the entry selected by a uniform `u ∈ [0, 1)`.
    pub fn index_for(&self, u: f64) -> usize {
        let i = self.cumulative.partition_point(|&c| c <= u);
        if i < self.cumulative.len() {
            i
        } else {
            // u at or above the final rounding-affected cumulative value
            self.weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
        }
    }

    pub fn sample(&self, rng: &mut GrdRng) -> &Composition {
        &self.entries[self.index_for(rng.uniform())]
    }
}
