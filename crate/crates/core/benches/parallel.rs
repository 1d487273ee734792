//! Parallel vs sequential timings for the subset-heavy verifiers and the
//! steering curve. The `*_seq` entry points are always available; the
//! default entry points use rayon when the `parallel` feature (default) is
//! enabled, so each group compares the two fairly in one run.

use criterion::{criterion_group, criterion_main, Criterion};

use irmoa::construct::construction2;
use irmoa::designs::{
    tensor_fourier_scheme, verify_difference_scheme, verify_difference_scheme_seq,
};
use irmoa::moa::{
    verify_irredundant, verify_irredundant_seq, verify_strength, verify_strength_seq,
};
use irmoa::qstate::{state_from_array, verify_k_uniform, verify_k_uniform_seq, DEFAULT_TOLERANCE};
use irmoa::steering::{steering_curve, steering_curve_seq, SteeringState};

fn bench_scheme_verification(c: &mut Criterion) {
    let scheme = tensor_fourier_scheme(2, 6).unwrap(); // 64 x 64 over GF(2)
    let mut g = c.benchmark_group("scheme_verify_64x64");
    g.bench_function("seq", |b| {
        b.iter(|| verify_difference_scheme_seq(&scheme).unwrap())
    });
    g.bench_function("par", |b| {
        b.iter(|| verify_difference_scheme(&scheme).unwrap())
    });
    g.finish();
}

fn bench_array_verifiers(c: &mut Criterion) {
    let array = construction2(&tensor_fourier_scheme(2, 4).unwrap()).unwrap(); // 32 x 17
    let mut g = c.benchmark_group("strength2_32x17");
    g.bench_function("seq", |b| {
        b.iter(|| verify_strength_seq(&array, 2).unwrap())
    });
    g.bench_function("par", |b| b.iter(|| verify_strength(&array, 2).unwrap()));
    g.finish();
    let mut g = c.benchmark_group("irredundant2_32x17");
    g.bench_function("seq", |b| {
        b.iter(|| verify_irredundant_seq(&array, 2).unwrap())
    });
    g.bench_function("par", |b| b.iter(|| verify_irredundant(&array, 2).unwrap()));
    g.finish();
}

fn bench_uniformity(c: &mut Criterion) {
    let array = construction2(&tensor_fourier_scheme(2, 4).unwrap()).unwrap();
    let state = state_from_array(&array, None).unwrap();
    let mut g = c.benchmark_group("k_uniform_2_of_17");
    g.bench_function("seq", |b| {
        b.iter(|| verify_k_uniform_seq(&state, 2, DEFAULT_TOLERANCE).unwrap())
    });
    g.bench_function("par", |b| {
        b.iter(|| verify_k_uniform(&state, 2, DEFAULT_TOLERANCE).unwrap())
    });
    g.finish();
}

fn bench_steering(c: &mut Criterion) {
    let grid: Vec<f64> = (0..8).map(|i| i as f64 * 0.05).collect();
    let mut g = c.benchmark_group("steering_curve_8pts");
    g.sample_size(10);
    g.bench_function("seq", |b| {
        b.iter(|| steering_curve_seq(SteeringState::Ghz3, &grid).unwrap())
    });
    g.bench_function("par", |b| {
        b.iter(|| steering_curve(SteeringState::Ghz3, &grid).unwrap())
    });
    g.finish();
}

criterion_group!(
    benches,
    bench_scheme_verification,
    bench_array_verifiers,
    bench_uniformity,
    bench_steering
);
criterion_main!(benches);
