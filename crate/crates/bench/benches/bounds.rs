use criterion::{black_box, criterion_group, criterion_main, Criterion};
use leakage_core::bounds::{alpha_div_bound, ml_bound};
use leakage_core::harness::{random_event, random_joint};
use leakage_core::orlicz::{theorem2_bound, OrliczFn};

fn bench_bounds(c: &mut Criterion) {
    let j = random_joint(3, 8, 8, 0.0).unwrap();
    let e = random_event(4, 8, 8, 0.4);
    let psi = OrliczFn::power(2.0).unwrap();

    c.bench_function("ml_bound 8x8", |b| {
        b.iter(|| ml_bound(black_box(&j), black_box(&e)).unwrap())
    });
    c.bench_function("alpha_div_bound alpha=2 8x8", |b| {
        b.iter(|| alpha_div_bound(black_box(&j), black_box(&e), 2.0).unwrap())
    });
    c.bench_function("theorem2_bound power-2 8x8", |b| {
        b.iter(|| theorem2_bound(black_box(&j), black_box(&e), black_box(&psi)).unwrap())
    });
}

criterion_group!(benches, bench_bounds);
criterion_main!(benches);
