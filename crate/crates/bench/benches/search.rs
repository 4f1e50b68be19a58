use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rado_core::lll::{check_lll_condition, EventSystem};
use rado_core::search::patterns::PatternCache;
use rado_core::search::{rado_number, rado_number_with, verify_certificate};
use rado_core::{enumerate_solutions, ColorSystem, LinearEquation, SearchConfig};

fn four_var(k: i64) -> ColorSystem {
    let eq = LinearEquation::new(&[(1, 1), (1, 2), (k, 3)], &[(4, 4)]).unwrap();
    ColorSystem::uniform(eq, 2).unwrap()
}

fn bench_rado(c: &mut Criterion) {
    let mut group = c.benchmark_group("rado_number");
    group.sample_size(10);
    for k in [11, 23, 40] {
        let sys = four_var(k);
        group.bench_with_input(BenchmarkId::new("x+y+kz=4w", k), &sys, |b, sys| {
            // fresh pattern cache each time, so layers are rebuilt
            b.iter(|| rado_number_with(sys, 2000, &SearchConfig::default(), &PatternCache::new(1 << 20)).unwrap())
        });
    }
    let schur3 = ColorSystem::uniform("x+y=z".parse().unwrap(), 3).unwrap();
    group.bench_function("schur r=3", |b| b.iter(|| rado_number(black_box(&schur3), 20, &SearchConfig::default())));
    group.finish();
}

fn bench_workers(c: &mut Criterion) {
    let sys = four_var(31);
    let mut group = c.benchmark_group("split");
    group.sample_size(10);
    for workers in [1, 2, 4] {
        let cfg = SearchConfig { workers, ..SearchConfig::default() };
        group.bench_with_input(BenchmarkId::from_parameter(workers), &cfg, |b, cfg| {
            b.iter(|| rado_number(&sys, 2000, cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_verify(c: &mut Criterion) {
    let sys = four_var(60);
    let cert = rado_number(&sys, 2000, &SearchConfig::default()).unwrap().certificate().clone();
    c.bench_function("verify_certificate k=60", |b| b.iter(|| verify_certificate(&sys, black_box(&cert)).unwrap()));
}

fn bench_enumerate(c: &mut Criterion) {
    let eq: LinearEquation = "x1+x2+x3+7*x4=8*x5".parse().unwrap();
    c.bench_function("enumerate E(5,7,8) n=60", |b| b.iter(|| enumerate_solutions(&eq, black_box(60)).unwrap().count()));
}

fn bench_lll(c: &mut Criterion) {
    let n = 200;
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| [(i, (i + 1) % n), (i, (i + 7) % n)]).collect();
    let sys = EventSystem::from_edges(vec![0.01; n], &edges, vec![1.3; n]).unwrap();
    c.bench_function("check_lll_condition 200 events", |b| b.iter(|| check_lll_condition(black_box(&sys))));
}

criterion_group!(benches, bench_rado, bench_workers, bench_verify, bench_enumerate, bench_lll);
criterion_main!(benches);
