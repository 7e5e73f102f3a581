use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use immersion_bench::{dense, j7};
use immersion_core::budget::SearchBudget;
use immersion_core::connectivity::lambda;
use immersion_core::immersion::find_double_cycle;
use immersion_core::lifting::reduce_degrees;
use immersion_core::packing::pack_spanning_trees;
use immersion_core::VertexId;

fn flows(c: &mut Criterion) {
    let g = dense(60);
    c.bench_function("lambda dense(60)", |b| b.iter(|| lambda(black_box(&g), VertexId(0), VertexId(59)).unwrap()));
}

fn lifting(c: &mut Criterion) {
    let g = dense(24);
    c.bench_function("reduce_degrees dense(24) k=2", |b| b.iter(|| reduce_degrees(black_box(&g), 2).unwrap()));
}

fn packing(c: &mut Criterion) {
    let g = dense(40);
    c.bench_function("pack_spanning_trees dense(40) k=3", |b| b.iter(|| pack_spanning_trees(black_box(&g), 3).unwrap()));
}

fn double_cycle(c: &mut Criterion) {
    let g = j7();
    c.bench_function("find_double_cycle J7 r=5", |b| b.iter(|| find_double_cycle(black_box(&g), 5, SearchBudget::default()).unwrap()));
}

criterion_group!(benches, flows, lifting, packing, double_cycle);
criterion_main!(benches);
