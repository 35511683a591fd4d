use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ilo_core::anticoncentration::distribution_zp;
use ilo_core::{PrimeModulus, Stream, ZpVector};
use rand::Rng;

fn vector(p: u64, n: usize) -> ZpVector {
    let p = PrimeModulus::new(p).unwrap();
    let mut rng = Stream::new(1).rng();
    ZpVector::new(p, (0..n).map(|_| rng.gen_range(0..p.get())).collect()).unwrap()
}

fn bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("distribution_zp");
    for (p, n) in [(101u64, 64usize), (101, 512), (1009, 512), (10007, 1024)] {
        let v = vector(p, n);
        g.bench_with_input(BenchmarkId::from_parameter(format!("p{p}_n{n}")), &v, |b, v| {
            b.iter(|| distribution_zp(black_box(v)))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
