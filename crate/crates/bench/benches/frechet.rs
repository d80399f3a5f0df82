use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use frechet_bench::{base_curve, spiked_pair};
use frechet_core::oracle::Family;
use frechet_core::permute::build_permutation;
use frechet_core::segquery::SegQueryIndex;
use frechet_core::shortcut::{decider, shortcut_frechet};
use frechet_core::{CurvePos, Segment};

fn bench_decider(c: &mut Criterion) {
    let mut g = c.benchmark_group("decider");
    g.sample_size(10);
    for n in [1024, 4096, 16384] {
        let (x, y) = spiked_pair(Family::Spiral, n, 0.02, 10.0);
        g.bench_with_input(BenchmarkId::new("spiral", n), &n, |b, _| {
            b.iter(|| decider(black_box(&x), black_box(&y), 1.0 / 3.0, 0.03))
        });
    }
    g.finish();
}

fn bench_shortcut(c: &mut Criterion) {
    let mut g = c.benchmark_group("shortcut_frechet");
    g.sample_size(10);
    for n in [256, 1024] {
        let (x, y) = spiked_pair(Family::Spiral, n, 0.02, 10.0);
        g.bench_with_input(BenchmarkId::new("spiral", n), &n, |b, _| {
            b.iter(|| shortcut_frechet(black_box(&x), black_box(&y), 0.5))
        });
    }
    g.finish();
}

fn bench_segquery(c: &mut Criterion) {
    let mut g = c.benchmark_group("segquery");
    for n in [256, 4096] {
        let z = base_curve(Family::RandomWalk, n);
        g.bench_with_input(BenchmarkId::new("build", n), &n, |b, _| {
            b.iter(|| SegQueryIndex::build(black_box(&z), 0.2))
        });
        let idx = SegQueryIndex::build(&z, 0.2).expect("valid curve");
        let u = CurvePos::from_param(n as f64 * 0.1, z.edge_count());
        let v = CurvePos::from_param(n as f64 * 0.9, z.edge_count());
        let seg = Segment::new(z.point_at(u), z.point_at(v)).expect("same dimension");
        g.bench_with_input(BenchmarkId::new("query", n), &n, |b, _| {
            b.iter(|| idx.query(u, v, black_box(&seg)))
        });
        g.bench_with_input(BenchmarkId::new("query_const", n), &n, |b, _| {
            b.iter(|| idx.query_const(u, v, black_box(&seg)))
        });
    }
    g.finish();
}

fn bench_permutation(c: &mut Criterion) {
    let mut g = c.benchmark_group("permutation");
    g.sample_size(10);
    for n in [256, 1024] {
        let z = base_curve(Family::RandomWalk, n);
        g.bench_with_input(BenchmarkId::new("build", n), &n, |b, _| {
            b.iter(|| build_permutation(black_box(&z)))
        });
    }
    g.finish();
}

criterion_group!(
    benches,
    bench_decider,
    bench_shortcut,
    bench_segquery,
    bench_permutation
);
criterion_main!(benches);
