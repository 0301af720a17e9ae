use criterion::{criterion_group, criterion_main, Criterion};
use g2q::{qint, RatFunc};

fn bench_ratfunc(c: &mut Criterion) {
    let a = RatFunc::from_poly(qint(7));
    let b = RatFunc::new(qint(5), qint(3));
    c.bench_function("ratfunc_mul", |bench| {
        bench.iter(|| std::hint::black_box(&a).mul(std::hint::black_box(&b)))
    });
    c.bench_function("ratfunc_add", |bench| {
        bench.iter(|| std::hint::black_box(&a).add(std::hint::black_box(&b)))
    });
}

criterion_group!(benches, bench_ratfunc);
criterion_main!(benches);
