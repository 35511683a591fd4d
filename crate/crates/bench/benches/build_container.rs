use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ilo_core::containers::gen_gap_vector;
use ilo_core::{build_container, ConstantsProfile, PrimeModulus, Stream};

fn bench(c: &mut Criterion) {
    let desk = ConstantsProfile::desk();
    let mut g = c.benchmark_group("build_container");
    g.sample_size(20);
    for (p, n) in [(53u64, 512usize), (101, 512), (101, 1024)] {
        let pm = PrimeModulus::new(p).unwrap();
        let v = gen_gap_vector(2, &[5, 11], &[4, 3], n, pm, &mut Stream::new(3).rng()).unwrap();
        let mut i = 0u64;
        g.bench_with_input(BenchmarkId::from_parameter(format!("p{p}_n{n}")), &v, |b, v| {
            b.iter(|| {
                i += 1;
                build_container(v, &desk, Stream::new(i)).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
