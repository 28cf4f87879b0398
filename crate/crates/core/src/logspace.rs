//! Log-space accumulation helpers.

/// `log Σ exp(x_i)`; `-∞` for an empty input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Streaming log-sum-exp over positive terms given by their logs.
#[derive(Debug, Clone, Copy)]
pub struct LogAccumulator {
    max: f64,
    scaled: f64,
}

impl Default for LogAccumulator {
    fn default() -> Self {
        LogAccumulator {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }
}

impl LogAccumulator {
    pub fn push(&mut self, log_term: f64) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if log_term > self.max {
            self.scaled = self.scaled * (self.max - log_term).exp() + 1.0;
            self.max = log_term;
        } else {
            self.scaled += (log_term - self.max).exp();
        }
    }

    pub fn log_value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

/// Accumulates signed terms stored as `(log |x|, sign)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SignedLogAccumulator {
    pos: LogAccumulator,
    neg: LogAccumulator,
}

impl SignedLogAccumulator {
    pub fn push(&mut self, log_abs: f64, negative: bool) {
        if negative {
            self.neg.push(log_abs);
        } else {
            self.pos.push(log_abs);
        }
    }

    pub fn log_positive(&self) -> f64 {
        self.pos.log_value()
    }

    pub fn log_negative(&self) -> f64 {
        self.neg.log_value()
    }

    pub fn value(&self) -> f64 {
        self.pos.log_value().exp() - self.neg.log_value().exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sum() {
        let xs = [0.1f64, -3.0, 2.5, 700.0, 699.0];
        let direct = 700.0 + (1.0 + (-1.0f64).exp()).ln();
        assert!((log_sum_exp(&xs) - direct).abs() < 1e-12);
        let mut acc = LogAccumulator::default();
        xs.iter().for_each(|&x| acc.push(x));
        assert!((acc.log_value() - direct).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn signed_accumulation() {
        let mut acc = SignedLogAccumulator::default();
        acc.push(3f64.ln(), false);
        acc.push(1f64.ln(), true);
        acc.push(0.5f64.ln(), false);
        assert!((acc.value() - 2.5).abs() < 1e-14);
    }
}
