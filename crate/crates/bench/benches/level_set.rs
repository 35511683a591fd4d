use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ilo_core::containers::{gen_gap_vector, level_set};
use ilo_core::{PrimeModulus, Stream, Threshold};

fn bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("level_set");
    for (p, n) in [(101u64, 512usize), (1009, 1024), (10007, 4096)] {
        let pm = PrimeModulus::new(p).unwrap();
        let v = gen_gap_vector(1, &[3], &[8], n, pm, &mut Stream::new(2).rng()).unwrap();
        let t = Threshold::new(n as u64, 32);
        g.bench_with_input(BenchmarkId::from_parameter(format!("p{p}_n{n}")), &v, |b, v| {
            b.iter(|| level_set(black_box(v), t))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
