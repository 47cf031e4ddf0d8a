use ccmetric_core::control::{circle_control, twist, Orientation};
use ccmetric_core::cycle::{random_loop, refine_and_decompose};
use ccmetric_core::stockyard::{optimize, Strategy};
use ccmetric_core::{Complex64, PotentialField};
use criterion::{criterion_group, criterion_main, Criterion};

fn bench_twist(c: &mut Criterion) {
    let field = PotentialField::quadratic(1.0).unwrap();
    let u = circle_control(256, Orientation::Cw).unwrap();
    c.bench_function("twist_circle_256", |b| {
        b.iter(|| twist(&field, Complex64::new(0.0, 0.0), std::f64::consts::TAU, &u).unwrap())
    });
}

fn bench_decompose(c: &mut Criterion) {
    let poly = random_loop(20, 5.0, 11);
    c.bench_function("refine_and_decompose_20gon", |b| {
        b.iter(|| refine_and_decompose(&poly).unwrap())
    });
}

fn bench_optimize(c: &mut Criterion) {
    let field = PotentialField::quadratic(1.0).unwrap();
    c.bench_function("optimize_single_circle", |b| {
        b.iter(|| {
            optimize(
                &field,
                Complex64::new(0.0, 0.0),
                10.0,
                Strategy::SingleCircle,
                100_000,
                0,
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, bench_twist, bench_decompose, bench_optimize);
criterion_main!(benches);
