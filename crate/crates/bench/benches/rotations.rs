use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jlroa::givens::{apply_givens, solve_generic, solve_pair, PairClass};
use jlroa::{run_jlroa, RunConfig};
use jlroa_bench::{tensor, working};

fn pair_solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_pair");
    for order in [3, 4] {
        let w = working(order, 6);
        let kept = PairClass::new(0, 1, 6, 2).unwrap();
        let dropped = PairClass::new(0, 4, 6, 2).unwrap();
        group.bench_function(BenchmarkId::new("kept", order), |b| {
            b.iter(|| solve_pair(black_box(&w), kept))
        });
        group.bench_function(BenchmarkId::new("dropped", order), |b| {
            b.iter(|| solve_pair(black_box(&w), dropped))
        });
        group.bench_function(BenchmarkId::new("sampled", order), |b| {
            b.iter(|| solve_generic(black_box(&w), kept))
        });
    }
    group.finish();
}

fn rotation(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_givens");
    for n in [5, 10, 20] {
        let w = working(3, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &w, |b, w| {
            b.iter(|| apply_givens(black_box(w), 0, n - 1, 0.3))
        });
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("cyclic_run");
    group.sample_size(20);
    for p in [1, 5, 10] {
        let a = tensor(3, 10);
        let cfg = RunConfig::new(p).with_max_sweeps(20);
        group.bench_with_input(BenchmarkId::new("n10", p), &cfg, |b, cfg| {
            b.iter(|| run_jlroa(black_box(&a), cfg))
        });
    }
    group.finish();
}

criterion_group!(benches, pair_solvers, rotation, sweeps);
criterion_main!(benches);
