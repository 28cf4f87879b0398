use thiserror::Error;

/// Errors raised by the GRD library.
///
/// Positions `k` are reported 1-based, matching the usual `a_1, ..., a_d`
/// notation for parameter vectors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrdError {
    #[error("dimension {d} is too small; at least 2 coordinates are required")]
    DimensionTooSmall { d: usize },

    #[error("entry {k} is not finite")]
    NonFiniteInput { k: usize },

    #[error("tail sum at k = {k} is {tail}, but tail sums must be positive for k >= 2")]
    TailSumViolation { k: usize, tail: f64 },

    #[error("point is not in the ordered simplex: {reason}")]
    NotInOrderedSimplex { reason: String },

    #[error("expected zero-sum parameters, but the total is {total}")]
    NotZeroSum { total: f64 },

    #[error("expected parameters summing to a negative integer -M (M >= 1), but the total is {total}")]
    NotNegativeIntegerSum { total: f64 },

    #[error("moment order {order} exceeds the inverse power {power} of Y_1")]
    BadMomentOrder { order: u64, power: u64 },

    #[error(
        "moment order {order} exceeds M = {max}; closed-form moments exist only up to order M when the parameters sum to -M"
    )]
    MomentOrderTooHigh { order: u64, max: u64 },

    #[error("composition sums to {found}, expected {expected}")]
    MismatchedTotal { expected: u64, found: u64 },

    #[error("length mismatch for {what}: expected {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("enumeration needs {required} compositions, above the cap of {cap}")]
    CapExceeded { required: u128, cap: u128 },

    #[error("MGF argument t_{k} = {t} is not below the rate {rate}")]
    MgfDomainViolation { k: usize, t: f64, rate: f64 },

    #[error("series did not converge after {terms} terms (last increment {last_increment:e}, partial sum {partial})")]
    NonConverged {
        partial: f64,
        terms: usize,
        last_increment: f64,
    },

    #[error("truncated weight for composition {composition:?} is {weight:e} after normalization")]
    NegativeTruncatedWeight { composition: Vec<u32>, weight: f64 },

    #[error("truncated series weights sum to {total}, cannot normalize")]
    DegenerateWeights { total: f64 },

    #[error("target has y_{k} tied with its successor or equal to zero")]
    TiedOrZeroWeights { k: usize },

    #[error("quadrature supports d in {{2, 3}}, got d = {d}")]
    UnsupportedDimension { d: usize },

    #[error("quadrature stopped at error estimate {error:e}, above the tolerance {tolerance:e}")]
    ToleranceNotReached { value: f64, error: f64, tolerance: f64 },

    #[error("estimator needs at least 2 values")]
    EmptyInput,

    #[error("goodness-of-fit test needs at least {min} samples, got {n}")]
    TooFewSamples { n: usize, min: usize },

    #[error("method `{method}` cannot sample parameters in the {case} case")]
    MethodCaseMismatch { method: String, case: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl GrdError {
    /// Stable machine-readable identifier, used by the CLI's JSON output.
    pub fn code(&self) -> &'static str {
        match self {
            GrdError::DimensionTooSmall { .. } => "DimensionTooSmall",
            GrdError::NonFiniteInput { .. } => "NonFiniteInput",
            GrdError::TailSumViolation { .. } => "TailSumViolation",
            GrdError::NotInOrderedSimplex { .. } => "NotInOrderedSimplex",
            GrdError::NotZeroSum { .. } => "NotZeroSum",
            GrdError::NotNegativeIntegerSum { .. } => "NotNegativeIntegerSum",
            GrdError::BadMomentOrder { .. } => "BadMomentOrder",
            GrdError::MomentOrderTooHigh { .. } => "MomentOrderTooHigh",
            GrdError::MismatchedTotal { .. } => "MismatchedTotal",
            GrdError::LengthMismatch { .. } => "LengthMismatch",
            GrdError::CapExceeded { .. } => "CapExceeded",
            GrdError::MgfDomainViolation { .. } => "MgfDomainViolation",
            GrdError::NonConverged { .. } => "NonConverged",
            GrdError::NegativeTruncatedWeight { .. } => "NegativeTruncatedWeight",
            GrdError::DegenerateWeights { .. } => "DegenerateWeights",
            GrdError::TiedOrZeroWeights { .. } => "TiedOrZeroWeights",
            GrdError::UnsupportedDimension { .. } => "UnsupportedDimension",
            GrdError::ToleranceNotReached { .. } => "ToleranceNotReached",
            GrdError::EmptyInput => "EmptyInput",
            GrdError::TooFewSamples { .. } => "TooFewSamples",
            GrdError::MethodCaseMismatch { .. } => "MethodCaseMismatch",
            GrdError::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, GrdError>;
