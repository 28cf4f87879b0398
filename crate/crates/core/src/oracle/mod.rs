//! Independent checks: quadrature, Monte Carlo estimators and
//! Kolmogorov-Smirnov tests.

pub mod ks;
pub mod mc;
pub mod quadrature;

pub use ks::{ks_test, ks_two_sample, KsResult};
pub use mc::{mc_estimate, mc_statistic, McEstimate, Statistic};
pub use quadrature::{quadrature_expectation, quadrature_moment, quadrature_truncated, Integrand, Quadrature};
