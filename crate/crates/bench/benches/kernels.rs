use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use otcurves_bench::{field, CUBIC, QUARTIC};
use otcurves_core::field::{compute_embeddings, validate_polynomial, DEFAULT_EPS_ROOT};
use otcurves_core::foliation::leaf_disjointness_suite;
use otcurves_core::forms::{omega_fd, stokes_residual};
use otcurves_core::units::{search_units, select_generators, DEFAULT_TAU_DET, DEFAULT_TAU_SIGN};
use otcurves_core::{Point, Tangent};
use std::hint::black_box;

fn field_kernels(c: &mut Criterion) {
    let poly = validate_polynomial(&QUARTIC, false).unwrap();
    c.bench_function("embeddings_quartic_128", |b| {
        b.iter(|| compute_embeddings(black_box(&poly), 128, DEFAULT_EPS_ROOT).unwrap())
    });
    let k = field(&CUBIC);
    c.bench_function("unit_search_cubic_b3", |b| b.iter(|| search_units(black_box(&k), 3, DEFAULT_TAU_SIGN).unwrap()));
}

fn form_kernels(c: &mut Criterion) {
    let p = Point::new(vec![Complex64::new(0.3, 1.7), Complex64::new(-1.0, 0.5)], 1).unwrap();
    let v = Tangent::new(vec![Complex64::new(0.2, -0.4), Complex64::new(1.0, 0.1)]);
    let w = Tangent::new(vec![Complex64::new(-0.7, 0.3), Complex64::new(0.0, 0.9)]);
    c.bench_function("omega_fd", |b| b.iter(|| omega_fd(black_box(&p), &v, &w, 1e-5).unwrap()));
    let p0 = Point::new(vec![Complex64::new(0.0, 2.0), Complex64::new(0.0, 0.0)], 1).unwrap();
    c.bench_function("stokes_256", |b| b.iter(|| stokes_residual(black_box(&p0), 0.3, 0, 256, 256).unwrap()));
}

fn foliation_kernels(c: &mut Criterion) {
    let k = field(&CUBIC);
    let found = search_units(&k, 2, DEFAULT_TAU_SIGN).unwrap();
    let gens = select_generators(&k, &found, DEFAULT_TAU_DET).unwrap();
    c.bench_function("leaf_suite_len2", |b| {
        b.iter(|| leaf_disjointness_suite(black_box(&k), &gens, 2, DEFAULT_TAU_SIGN).unwrap())
    });
}

criterion_group!(benches, field_kernels, form_kernels, foliation_kernels);
criterion_main!(benches);
