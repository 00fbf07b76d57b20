//! Throughput benchmarks for the hot paths: construction, coherence scans
//! (both the direct path and the blocked-multiply path), spectral norm,
//! sign flipping, and the Monte-Carlo experiment loops.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use frame_forge_core::coherence::{average_coherence, worst_case_coherence};
use frame_forge_core::constructions::{chirp, code_frame, gabor_alltop, gaussian_normalized};
use frame_forge_core::equivalence::linear_flip;
use frame_forge_core::gf2m::FieldContext;
use frame_forge_core::sparse::{recovery_experiment, weak_rip_test};
use frame_forge_core::Complex64;

fn bench_constructions(c: &mut Criterion) {
    let mut g = c.benchmark_group("construct");
    g.bench_function("chirp_47x2209", |b| b.iter(|| chirp(black_box(47)).unwrap()));
    g.bench_function("gabor_alltop_47x2209", |b| {
        b.iter(|| gabor_alltop(black_box(47)).unwrap())
    });
    g.bench_function("gaussian_200x2000", |b| {
        b.iter(|| gaussian_normalized(black_box(200), black_box(2000), 0).unwrap())
    });
    let ctx = FieldContext::default_for(6).unwrap();
    g.bench_function("code_64x4096", |b| b.iter(|| code_frame(black_box(&ctx), 1).unwrap()));
    g.finish();
}

fn bench_coherence(c: &mut Criterion) {
    let mut g = c.benchmark_group("coherence");
    g.sample_size(20);

    // n^2 m = 1e8: stays on the direct scan
    let direct = gaussian_normalized(100, 1000, 7).unwrap();
    g.bench_function("mu_direct_100x1000", |b| {
        b.iter(|| worst_case_coherence(black_box(&direct)).unwrap())
    });

    // n^2 m = 1.28e9: takes the blocked-multiply scan
    let blocked = gaussian_normalized(200, 2530, 7).unwrap();
    g.bench_function("mu_blocked_200x2530", |b| {
        b.iter(|| worst_case_coherence(black_box(&blocked)).unwrap())
    });

    g.bench_function("nu_100x1000", |b| {
        b.iter(|| average_coherence(black_box(&direct)).unwrap())
    });

    let spectral = chirp(31).unwrap();
    g.bench_function("spectral_norm_31x961", |b| {
        b.iter(|| black_box(&spectral).spectral_norm().unwrap())
    });
    g.finish();
}

fn bench_flip(c: &mut Criterion) {
    let frame = gaussian_normalized(10, 300, 3).unwrap();
    c.bench_function("linear_flip_10x300", |b| {
        b.iter(|| linear_flip(black_box(&frame)).unwrap())
    });
}

fn bench_experiments(c: &mut Criterion) {
    let mut g = c.benchmark_group("experiments");
    g.sample_size(10);
    let frame = chirp(31).unwrap();
    let ones = vec![Complex64::new(1.0, 0.0); 4];
    g.bench_function("weak_rip_31x961_k4_2000_trials", |b| {
        b.iter(|| weak_rip_test(black_box(&frame), &ones, 0.5, 2000, 42).unwrap())
    });
    g.bench_function("recovery_31x961_k3_50_trials", |b| {
        b.iter(|| {
            recovery_experiment(black_box(&frame), 3, 1.0, 10.0, 1.0, 0.5, 50, 42, None).unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, bench_constructions, bench_coherence, bench_flip, bench_experiments);
criterion_main!(benches);
