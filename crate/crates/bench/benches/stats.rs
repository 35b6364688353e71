//! Benchmarks for the hot statistical paths: exact pmf evaluation, the
//! significance test, the compatibility scan with boundary refinement, and
//! bulk simulation.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use ttstat::report::emit_curve;
use ttstat::sim::simulate;
use ttstat::stats::{binomial_pmf, compatible_set, exact_significance};
use ttstat::{Prob, Scalar};
use ttstat_bench::{large_observation, replication_observation, simulation_config};

fn bench_pmf(c: &mut Criterion) {
    let obs = large_observation();
    let half = Prob::half();
    c.bench_function("binomial_pmf 100 choose 60 exact", |b| {
        b.iter(|| binomial_pmf(black_box(&obs), black_box(&half)))
    });
}

fn bench_significance(c: &mut Criterion) {
    let obs = large_observation();
    let half = Prob::half();
    let level = Prob::exact(1, 100).unwrap();
    c.bench_function("exact_significance n=100", |b| {
        b.iter(|| exact_significance(black_box(&obs), &half, &level).unwrap())
    });
}

fn bench_compatible_set(c: &mut Criterion) {
    let obs = replication_observation();
    let level = Prob::exact(1, 100).unwrap();
    let step = Scalar::exact(1, 100);
    c.bench_function("compatible_set 101-point grid refined", |b| {
        b.iter(|| compatible_set(black_box(&obs), &level, &step, true).unwrap())
    });
}

fn bench_curve(c: &mut Criterion) {
    let obs = replication_observation();
    let level = Prob::exact(1, 100).unwrap();
    let step = Scalar::exact(1, 100);
    c.bench_function("emit_curve 101 rows", |b| {
        b.iter(|| emit_curve(black_box(&obs), &level, &step).unwrap())
    });
}

fn bench_simulate(c: &mut Criterion) {
    let config = simulation_config();
    c.bench_function("simulate 10k three-player trials", |b| {
        b.iter(|| simulate(black_box(&config)))
    });
}

criterion_group!(
    benches,
    bench_pmf,
    bench_significance,
    bench_compatible_set,
    bench_curve,
    bench_simulate
);
criterion_main!(benches);
