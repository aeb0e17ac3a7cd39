use adnovel_bench::{cloud, single_sweep, OMEGA_0N};
use adnovel_core::operators::unitary_step;
use adnovel_core::{build_rotating_hamiltonian, propagate};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    for shift in [0.0, 0.5] {
        let (spec, sched, rho0) = single_sweep(shift);
        g.bench_with_input(BenchmarkId::new("single", shift), &shift, |b, _| {
            b.iter(|| propagate(&spec, &sched, black_box(&rho0), 200, 1e-6).unwrap())
        });
    }
    for k in [2, 3, 4] {
        let (spec, sched, rho0) = cloud(k);
        g.bench_with_input(BenchmarkId::new("cloud", k), &k, |b, _| {
            b.iter(|| propagate(&spec, &sched, black_box(&rho0), 100, 1e-5).unwrap())
        });
    }
    g.finish();
}

fn step(c: &mut Criterion) {
    let mut g = c.benchmark_group("unitary_step");
    for k in [1, 3, 5] {
        let (spec, _, _) = cloud(k);
        let h = build_rotating_hamiltonian(&spec, OMEGA_0N).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, _| {
            b.iter(|| unitary_step(black_box(&h.entries), 1e-10))
        });
    }
    g.finish();
}

criterion_group!(benches, sweep, step);
criterion_main!(benches);
