use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hexsim_core::kinematics::{
    eval_polynomial, fit_polynomial, savitzky_golay, DEFAULT_LIFT_COEFFICIENTS,
};
use hexsim_core::LegModel;

fn lift_and_foot(c: &mut Criterion) {
    let leg = LegModel::default();
    let period = leg.period();
    c.bench_function("lift_height_1k", |b| {
        b.iter(|| {
            (0..1000)
                .map(|i| leg.height(black_box(i as f64 * period / 1000.0)))
                .sum::<f64>()
        })
    });
    c.bench_function("foot_position_1k", |b| {
        b.iter(|| {
            (0..1000)
                .map(|i| leg.foot(black_box(i as f64 * period / 1000.0)).x)
                .sum::<f64>()
        })
    });
}

fn numerics(c: &mut Criterion) {
    let period = LegModel::default().period();
    let samples: Vec<(f64, f64)> = (0..500)
        .map(|i| {
            let x = period * i as f64 / 499.0;
            (
                x,
                eval_polynomial(&DEFAULT_LIFT_COEFFICIENTS, x) + 0.1 * (x * 7.0).sin(),
            )
        })
        .collect();
    c.bench_function("savitzky_golay_500_w11_p3", |b| {
        b.iter(|| savitzky_golay(black_box(&samples), 11, 3).unwrap())
    });
    c.bench_function("fit_quartic_500", |b| {
        b.iter(|| fit_polynomial(black_box(&samples), 4).unwrap())
    });
}

criterion_group!(benches, lift_and_foot, numerics);
criterion_main!(benches);
