use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use grd_bench::{fixture, negative_integer_fixtures, FIXTURES};
use grd_core::{
    build_sampler, expected_power_y1_series, loggap_moments, mixture_weights, negative_moment_y1, positive_moments,
    signed_series_weights, GrdRng, ParamCase, SamplingMethod, SeriesConfig,
};

fn weights(c: &mut Criterion) {
    let mut g = c.benchmark_group("mixture_weights");
    for (label, p) in negative_integer_fixtures() {
        g.bench_function(label, |b| b.iter(|| mixture_weights(black_box(&p)).unwrap()));
    }
    let cfg = SeriesConfig::default();
    let p = fixture(&[-3.0, 0.5, 1.0]);
    for k in [10, 20, 40] {
        g.bench_with_input(BenchmarkId::new("series r1.5 d3", k), &k, |b, &k| {
            b.iter(|| signed_series_weights(&p, k, &cfg).unwrap())
        });
    }
    g.finish();
}

fn moments(c: &mut Criterion) {
    let mut g = c.benchmark_group("moments");
    let zs = fixture(&[-5.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
    g.bench_function("E[1/Y1^3] d6", |b| b.iter(|| negative_moment_y1(black_box(&zs), 3).unwrap()));
    let m3 = fixture(&[-7.0, 1.0, 1.0, 1.0, 1.0]);
    g.bench_function("E[Y1 Y2] M3 d5", |b| {
        b.iter(|| positive_moments(black_box(&m3), &[1, 1, 0, 0, 0]).unwrap())
    });
    g.bench_function("E[Z2 Z3] M3 d5", |b| b.iter(|| loggap_moments(black_box(&m3), &[1, 1, 0, 0]).unwrap()));
    let cfg = SeriesConfig::default();
    g.bench_function("series E[Y1^-0.5] d3", |b| {
        b.iter(|| expected_power_y1_series(black_box(&fixture(&[-1.5, 0.5, 1.0])), 0.5, &cfg).unwrap())
    });
    g.finish();
}

fn samplers(c: &mut Criterion) {
    let mut g = c.benchmark_group("draw");
    let cfg = SeriesConfig::default();
    for (label, a) in FIXTURES {
        let p = fixture(a);
        let method = match p.case() {
            ParamCase::ZeroSum => SamplingMethod::ZeroSum,
            ParamCase::NegativeIntegerSum { .. } => SamplingMethod::Exact,
            ParamCase::General { .. } => SamplingMethod::Approx,
        };
        for m in [method, SamplingMethod::Rejection] {
            let s = build_sampler(&p, m, cfg.sample_k, &cfg).unwrap();
            let mut rng = GrdRng::seed_from_u64(1);
            g.bench_function(format!("{label} {}", m.name()), |b| b.iter(|| s.draw(&mut rng)));
        }
    }
    g.finish();
}

criterion_group!(benches, weights, moments, samplers);
criterion_main!(benches);
