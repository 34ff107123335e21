use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use joinlab_bench::cube_triples;
use joinlab_core::joinability::{channel_margin, local_positive_joinable, state_margin};
use joinlab_core::oracle::{
    block_positive_minimum, oracle_channel_joinable_with, oracle_local_positive_joinable,
    oracle_state_joinable_with, OracleConfig, DEFAULT_TOL,
};
use joinlab_core::{brauer_operator, BrauerParams, EtaTriple, Pivot};

fn analytic(c: &mut Criterion) {
    let triples = cube_triples(21);
    c.bench_function("analytic_state_channel_local_21cube", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for &t in &triples {
                acc += state_margin(2, t) + channel_margin(2, t, Pivot::A);
                acc += local_positive_joinable(t).margin;
            }
            black_box(acc)
        })
    });
}

fn eigen_oracles(c: &mut Criterion) {
    let inside = EtaTriple::new(0.1, -0.2, 0.15);
    let outside = EtaTriple::new(0.2, 0.2, -0.35);
    let full = OracleConfig::default();
    let screen = OracleConfig::screening();
    c.bench_function("state_oracle_d2_full", |b| {
        b.iter(|| oracle_state_joinable_with(2, black_box(inside), &full).unwrap())
    });
    c.bench_function("state_oracle_d3_screening", |b| {
        b.iter(|| oracle_state_joinable_with(3, black_box(inside), &screen).unwrap())
    });
    c.bench_function("state_oracle_d3_infeasible", |b| {
        b.iter(|| oracle_state_joinable_with(3, black_box(outside), &screen).unwrap())
    });
    c.bench_function("channel_oracle_d2_full", |b| {
        b.iter(|| oracle_channel_joinable_with(2, black_box(outside), Pivot::A, &full).unwrap())
    });
}

fn product_oracles(c: &mut Criterion) {
    c.bench_function("local_objective_grid_newton", |b| {
        b.iter(|| oracle_local_positive_joinable(black_box(EtaTriple::new(0.5, 0.4, 0.3)), DEFAULT_TOL))
    });
    let m = brauer_operator(BrauerParams::new(3, -0.4, 0.2).unwrap()).unwrap();
    c.bench_function("block_positive_d3", |b| {
        b.iter(|| block_positive_minimum(black_box(&m), 3, 3, 7).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = analytic, eigen_oracles, product_oracles
}
criterion_main!(benches);
