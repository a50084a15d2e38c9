use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use orlicz::luxemburg::{norm_seq, norm_trig};
use orlicz::trig::dyadic_piece;
use orlicz::{NormOptions, YoungFunction};
use orlicz_bench::{example_phi, frame_poly, sequence};
use std::hint::black_box;

fn bench_norm_seq(c: &mut Criterion) {
    let mut group = c.benchmark_group("norm_seq");
    let cube = YoungFunction::power(3.0).unwrap();
    let example = example_phi();
    for len in [64, 4096] {
        let x = sequence(len);
        group.bench_with_input(BenchmarkId::new("power3", len), &x, |b, x| b.iter(|| norm_seq(&cube, black_box(x))));
        group.bench_with_input(BenchmarkId::new("example", len), &x, |b, x| b.iter(|| norm_seq(&example, black_box(x))));
    }
    group.finish();
}

fn bench_norm_trig(c: &mut Criterion) {
    let mut group = c.benchmark_group("norm_trig");
    group.sample_size(10);
    let phi = example_phi();
    let single = NormOptions { max_doublings: 0, ..NormOptions::default() };
    for level in [3, 4] {
        let f = frame_poly(level);
        group.bench_with_input(BenchmarkId::new("frame", level), &f, |b, f| b.iter(|| norm_trig(&phi, black_box(f), &single)));
    }
    group.finish();
}

fn bench_dyadic_piece(c: &mut Criterion) {
    let f = frame_poly(5);
    c.bench_function("dyadic_piece/level5", |b| b.iter(|| dyadic_piece(black_box(&f), 5).unwrap()));
}

criterion_group!(benches, bench_norm_seq, bench_norm_trig, bench_dyadic_piece);
criterion_main!(benches);
