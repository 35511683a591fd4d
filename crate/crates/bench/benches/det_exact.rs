use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ilo_core::matrix::{det_bareiss, det_exact, is_singular};
use ilo_core::{Stream, SymMatrix};

fn bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("det_exact");
    for n in [8usize, 16, 32, 64] {
        let m = SymMatrix::sample(n, &mut Stream::new(n as u64).rng());
        g.bench_with_input(BenchmarkId::new("crt", n), &m, |b, m| b.iter(|| det_exact(black_box(m))));
        g.bench_with_input(BenchmarkId::new("singular", n), &m, |b, m| b.iter(|| is_singular(black_box(m))));
        let vals = m.to_i64();
        g.bench_with_input(BenchmarkId::new("bareiss", n), &vals, |b, v| b.iter(|| det_bareiss(black_box(v), n)));
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
