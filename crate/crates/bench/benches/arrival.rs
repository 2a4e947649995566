use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use arrival_core::flows::verify;
use arrival_core::local_search::default_walk_budget;
use arrival_core::{
    augment, build_instance, decide_arrival, generate, run, solve_s_arrival, walk_localopt, GeneratorSpec, Model,
};

fn instances() -> Vec<(usize, arrival_core::SwitchGraph)> {
    [6, 10, 14]
        .into_iter()
        .map(|n| (n, generate(&GeneratorSpec { n, seed: 11, model: Model::Layered }).unwrap()))
        .collect()
}

fn simulate(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate");
    for (n, g) in instances() {
        group.bench_with_input(BenchmarkId::new("run", n), &g, |b, g| b.iter(|| run(black_box(g), None).unwrap()));
        group.bench_with_input(BenchmarkId::new("decide", n), &g, |b, g| {
            b.iter(|| decide_arrival(black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn flows(c: &mut Criterion) {
    let mut group = c.benchmark_group("flows");
    for (n, g) in instances() {
        let aug = augment(&g);
        let profile = run(&aug.h, None).unwrap().profile;
        group.bench_with_input(BenchmarkId::new("verify", n), &profile, |b, x| {
            b.iter(|| verify(&aug.h, aug.o_bar, aug.h.dest(), black_box(x)).unwrap())
        });
    }
    group.finish();
}

fn local_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("local_search");
    for (n, g) in instances() {
        let inst = build_instance(augment(&g)).unwrap();
        group.bench_with_input(BenchmarkId::new("walk", n), &inst, |b, inst| {
            b.iter(|| walk_localopt(inst, inst.reset_state(), default_walk_budget(inst.m()), false).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("solve", n), &g, |b, g| {
            b.iter(|| solve_s_arrival(black_box(g)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, simulate, flows, local_search);
criterion_main!(benches);
