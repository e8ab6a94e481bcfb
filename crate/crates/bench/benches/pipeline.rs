//! Benchmarks for the hot paths: per-direction classification, spectrum
//! extraction, the eigenbasis factorization and determinant interpolation.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use nalgebra::DVector;
use std::hint::black_box;

use pencilhyp_core::classify::classify_direction;
use pencilhyp_core::eigenstruct::spectrum;
use pencilhyp_core::factorize::factorize_pencil;
use pencilhyp_core::matcore::Tolerances;
use pencilhyp_core::models::{self, maxwell_system, MaxwellConfig};
use pencilhyp_core::pencil::{build_quadratic, det_identity_residual};

use pencilhyp_bench::{random_pencil, separated_factor_pencil};

fn bench_classify(c: &mut Criterion) {
    let tol = Tolerances::default();
    let wave = models::wave(3);
    let khat3 = DVector::from_vec(vec![0.6, 0.0, 0.8]);
    c.bench_function("classify_direction/wave_3d", |b| {
        b.iter(|| classify_direction(black_box(&wave), black_box(&khat3), &tol).unwrap())
    });

    let maxwell = maxwell_system(&MaxwellConfig::minkowski()).unwrap();
    c.bench_function("classify_direction/maxwell_minkowski", |b| {
        b.iter(|| classify_direction(black_box(&maxwell), black_box(&khat3), &tol).unwrap())
    });
}

fn bench_spectrum(c: &mut Criterion) {
    let tol = Tolerances::default();
    for n in [4usize, 8] {
        let pencil = random_pencil(n, 42);
        c.bench_function(&format!("spectrum/random_n{n}"), |b| {
            b.iter(|| spectrum(black_box(&pencil), &tol).unwrap())
        });
    }
}

fn bench_factorize(c: &mut Criterion) {
    let tol = Tolerances::default();
    for n in [4usize, 8] {
        let pencil = separated_factor_pencil(n, 7);
        let sd = spectrum(&pencil, &tol).unwrap();
        c.bench_function(&format!("factorize/diagonalizable_n{n}"), |b| {
            b.iter_batched(
                || sd.clone(),
                |sd| factorize_pencil(black_box(&pencil), &sd, &tol).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
}

fn bench_det_poly(c: &mut Criterion) {
    let tol = Tolerances::default();
    let pencil = random_pencil(6, 3);
    c.bench_function("det_identity/n6", |b| {
        b.iter(|| det_identity_residual(black_box(&pencil), &tol).unwrap())
    });
}

fn bench_maxwell_build(c: &mut Criterion) {
    let tol = Tolerances::default();
    let cfg = MaxwellConfig::minkowski();
    let khat = DVector::from_vec(vec![0.6, 0.0, 0.8]);
    c.bench_function("maxwell/system_and_pencil", |b| {
        b.iter(|| {
            let sys = maxwell_system(black_box(&cfg)).unwrap();
            build_quadratic(&sys, &khat, &tol).unwrap()
        })
    });
}

criterion_group!(
    benches,
    bench_classify,
    bench_spectrum,
    bench_factorize,
    bench_det_poly,
    bench_maxwell_build
);
criterion_main!(benches);
