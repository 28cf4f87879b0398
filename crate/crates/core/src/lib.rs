//! Generalized rank Dirichlet distributions GRD(a) on the ordered simplex
//! `{y_1 >= ... >= y_d >= 0, Σ y = 1}`, with unnormalized density
//! `Π y_k^{a_k - 1}`.
//!
//! Parameters are admissible when every tail sum `ā_k = a_k + ... + a_d`,
//! `k >= 2`, is positive. The total `ā_1` selects what is available:
//!
//! | `ā_1` | moments | sampler |
//! |---|---|---|
//! | `0` | closed form ([`moments`]) | [`ZeroSumSampler`] |
//! | `-M`, `M` a positive integer | finite mixture ([`mixture`]) | [`MixtureSampler::exact`] |
//! | anything else | binomial series ([`series`]) | [`MixtureSampler::approximate`], [`RejectionSampler`] |
//!
//! [`oracle`] holds the independent checks used by the tests: quadrature for
//! `d <= 3`, Monte Carlo estimators and Kolmogorov-Smirnov tests.

pub mod compositions;
pub mod error;
pub mod logspace;
pub mod mixture;
pub mod moments;
pub mod oracle;
pub mod params;
pub mod rng;
pub mod sampling;
pub mod series;

pub use compositions::{
    composition_count, enumerate_compositions, enumerate_compositions_with_cap, log_multinomial, ClipReport,
    Composition, MixtureTable, NegativeWeightPolicy, DEFAULT_COMPOSITION_CAP,
};
pub use error::{GrdError, Result};
pub use mixture::{loggap_law_zero_sum, loggap_mgf, loggap_moments, mixture_weights, LogGapMixture, LogGapVector};
pub use moments::{
    calibrate_first_moment, mean_vector_m1, negative_moment_y1, positive_moments, ratio_moment_zero_sum,
};
pub use params::{validate_params, GrdParams, OrderedPoint, ParamCase};
pub use rng::{GrdRng, GENERATOR_ID};
pub use sampling::{
    build_sampler, sample_approximate_general, sample_batch, sample_exact_negative_integer,
    sample_rejection_oracle, sample_zero_sum, write_csv, write_jsonl, Draw, GrdSampler, MixtureSampler,
    RejectionSampler, RejectionStats, SampleBatch, SamplingMethod, ZeroSumSampler,
};
pub use series::{
    expected_power_y1_series, loggap_moments_series, signed_series_weights, SeriesConfig, SeriesDiagnostics,
    SeriesMixture, SeriesValue,
};
