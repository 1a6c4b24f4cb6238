use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use loynes::{
    block_scgf, block_sums, exponent_from_scgf, lindley_recursion, markov_mle, spectral_radius,
    two_state_j, RootOpts, ScgfEvaluator, SquareMatrix,
};
use loynes_bench::{dm1_trace, two_state_trace};

fn scgf(c: &mut Criterion) {
    let trace = dm1_trace(50_000, 1);
    let blocked = block_sums(&trace, 1).unwrap();
    c.bench_function("block_scgf/50k", |b| {
        b.iter(|| block_scgf(&blocked, black_box(0.15)))
    });

    let evaluator = ScgfEvaluator::block(blocked);
    let opts = RootOpts::default();
    c.bench_function("block_exponent/50k", |b| {
        b.iter(|| exponent_from_scgf(black_box(&evaluator), &opts))
    });

    let chain = two_state_trace(100_000, 1);
    let states = [-1.0, 1.0];
    c.bench_function("markov_exponent/100k", |b| {
        b.iter(|| {
            let est = markov_mle(black_box(&chain), &states).unwrap();
            exponent_from_scgf(&ScgfEvaluator::markov(&est, &states).unwrap(), &opts)
        })
    });
}

fn spectral(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectral_radius");
    for dim in [2usize, 8, 32] {
        let rows: Vec<Vec<f64>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| 1.0 + ((i * 7 + j * 3) % 5) as f64)
                    .collect()
            })
            .collect();
        let m = SquareMatrix::from_rows(rows).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(dim), &m, |b, m| {
            b.iter(|| spectral_radius(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn rate_function(c: &mut Criterion) {
    c.bench_function("two_state_j", |b| {
        b.iter(|| two_state_j(1.0 / 16.0, 3.0 / 16.0, black_box(0.8)))
    });
}

fn lindley(c: &mut Criterion) {
    let trace = dm1_trace(50_000, 2);
    c.bench_function("lindley/50k", |b| {
        b.iter(|| lindley_recursion(black_box(&trace), 0.0).unwrap())
    });
}

criterion_group!(benches, scgf, spectral, rate_function, lindley);
criterion_main!(benches);
