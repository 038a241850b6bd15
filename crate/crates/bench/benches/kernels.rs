use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use topamp_core::numerics::{eig, svd};
use topamp_core::response::{gains_at, output_noise_profile};
use topamp_core::steadystate::{steady_correlation_with, Method};
use topamp_core::topology::singular_gap_map;
use topamp_core::{build_chain_spec, build_dynamical_matrix, Boundary, ChainParams};

fn chain(n: usize) -> ChainParams {
    ChainParams::reference_chain().with_sites(n)
}

fn decompositions(c: &mut Criterion) {
    let mut group = c.benchmark_group("decomposition");
    for n in [10, 50, 100] {
        let spec = build_chain_spec(&chain(n).with_gamma_p(1.3), Boundary::Periodic).unwrap();
        let h = build_dynamical_matrix(&spec).unwrap();
        let shifted = h.shifted(0.3);
        group.bench_with_input(BenchmarkId::new("svd", n), &shifted, |b, a| b.iter(|| svd(black_box(a)).unwrap()));
        group.bench_with_input(BenchmarkId::new("eig", n), &h.h, |b, a| b.iter(|| eig(black_box(a)).unwrap()));
    }
    group.finish();
}

fn gain_scan(c: &mut Criterion) {
    let spec = build_chain_spec(&chain(30), Boundary::Open).unwrap();
    let h = build_dynamical_matrix(&spec).unwrap();
    let omegas: Vec<f64> = (0..101).map(|k| -3.0 + 0.06 * k as f64).collect();
    c.bench_function("gain_scan_n30_101pts", |b| {
        b.iter(|| omegas.iter().map(|&w| gains_at(&h, w, 0).unwrap()[29]).sum::<f64>())
    });
}

fn phase_map_row(c: &mut Criterion) {
    let omegas: Vec<f64> = (0..60).map(|k| -3.0 + 6.0 * k as f64 / 59.0).collect();
    let mut group = c.benchmark_group("phase_map");
    group.sample_size(10);
    group.bench_function("row_n100_60pts", |b| {
        b.iter(|| singular_gap_map(&ChainParams::reference_chain(), black_box(&omegas), &[1.0], 100).unwrap())
    });
    group.finish();
}

fn noise(c: &mut Criterion) {
    let mut group = c.benchmark_group("noise");
    group.sample_size(20);
    let spec = build_chain_spec(&chain(30), Boundary::Open).unwrap();
    group.bench_function("output_noise_quadrature_n30", |b| b.iter(|| output_noise_profile(&spec, 1e-8).unwrap()));
    let h = build_dynamical_matrix(&spec).unwrap();
    group.bench_function("steady_state_lyapunov_n30", |b| {
        b.iter(|| steady_correlation_with(&h, &spec.pump, Method::Auto).unwrap())
    });
    group.finish();
}

criterion_group!(benches, decompositions, gain_scan, phase_map_row, noise);
criterion_main!(benches);
