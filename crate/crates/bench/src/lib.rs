//! Parameter fixtures shared by the benchmarks.

use grd_core::{validate_params, GrdParams};

/// `(label, a)` pairs covering the three cases at a few dimensions.
pub const FIXTURES: &[(&str, &[f64])] = &[
    ("zero-sum d3", &[-1.5, 0.5, 1.0]),
    ("zero-sum d6", &[-5.0, 1.0, 1.0, 1.0, 1.0, 1.0]),
    ("int M1 d3", &[-2.5, 0.5, 1.0]),
    ("int M3 d5", &[-7.0, 1.0, 1.0, 1.0, 1.0]),
    ("general r0.5 d2", &[-1.5, 1.0]),
    ("general r1.5 d3", &[-3.0, 0.5, 1.0]),
];

pub fn fixture(a: &[f64]) -> GrdParams {
    validate_params(a).expect("fixture parameters are admissible")
}

pub fn negative_integer_fixtures() -> impl Iterator<Item = (&'static str, GrdParams)> {
    FIXTURES
        .iter()
        .filter(|(l, _)| l.starts_with("int"))
        .map(|(l, a)| (*l, fixture(a)))
}
