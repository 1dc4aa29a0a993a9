use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use powerdomain::{build_schedule, cdf, lower_adjoint, pushforward_lebesgue, represent, skorohod};
use powerdomain_bench::{chain_target, diamond_target, order_pairs};

fn order(c: &mut Criterion) {
    let mut group = c.benchmark_group("order");
    for size in [4, 6] {
        let pairs = order_pairs(1, 64, size, 4);
        group.bench_with_input(BenchmarkId::new("max_flow", size), &pairs, |b, pairs| {
            b.iter(|| pairs.iter().filter(|(mu, nu)| mu.leq(nu).unwrap()).count())
        });
        group.bench_with_input(BenchmarkId::new("upper_sets", size), &pairs, |b, pairs| {
            b.iter(|| pairs.iter().filter(|(mu, nu)| mu.leq_oracle(nu).unwrap()).count())
        });
    }
    group.finish();
}

fn representation(c: &mut Criterion) {
    let mut group = c.benchmark_group("represent");
    let target = diamond_target(2, 6);
    for k in [1, 2, 4] {
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| represent(&build_schedule(black_box(&target), k).unwrap()).unwrap())
        });
    }
    group.bench_function("skorohod_tabulate", |b| {
        b.iter(|| skorohod(black_box(&target), 2).unwrap().tabulate().unwrap())
    });
    group.finish();
}

fn chain(c: &mut Criterion) {
    let target = chain_target(3, 8, 8);
    c.bench_function("chain_round_trip", |b| {
        b.iter(|| pushforward_lebesgue(&lower_adjoint(&cdf(black_box(&target)).unwrap())).unwrap())
    });
}

criterion_group!(benches, order, representation, chain);
criterion_main!(benches);
