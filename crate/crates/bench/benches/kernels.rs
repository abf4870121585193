use std::hint::black_box;

use besselkit_core::fbt::fb_numeric;
use besselkit_core::kernels::{r_field, s_field, SignatureSplit};
use besselkit_core::shiftconv::shift;
use besselkit_core::specfun::normalized_j;
use besselkit_core::{GaussPoly, PositivePoint, QuadSpec, ScalarField, WeightVector};
use criterion::{criterion_group, criterion_main, Criterion};

fn special_functions(c: &mut Criterion) {
    let ts: Vec<f64> = (0..64).map(|i| 0.37 * i as f64).collect();
    c.bench_function("normalized_j/64 points", |b| {
        b.iter(|| ts.iter().map(|&t| normalized_j(black_box(1.3), t).unwrap()).sum::<f64>())
    });
}

fn kernel_evaluation(c: &mut Criterion) {
    let v = WeightVector::new(vec![0.6, 0.7, 1.3]).unwrap();
    let split = SignatureSplit::new(1, 2).unwrap();
    let s = s_field(2, &v).unwrap();
    let r = r_field(2, &v, &split).unwrap();
    let x = [2.0, 0.7, 0.9];
    c.bench_function("kernel/S_2", |b| b.iter(|| s.eval(black_box(&x))));
    c.bench_function("kernel/R_2", |b| b.iter(|| r.eval(black_box(&x))));
}

fn shift_and_transform(c: &mut Criterion) {
    let spec = QuadSpec::default();
    let v2 = WeightVector::new(vec![0.75, 1.25]).unwrap();
    let f = GaussPoly::gaussian(2, 1.0).unwrap();
    let (x, y) = (PositivePoint::new(vec![0.8, 1.1]).unwrap(), PositivePoint::new(vec![0.5, 0.3]).unwrap());
    c.bench_function("shift/n=2", |b| b.iter(|| shift(&f, black_box(&x), &y, &v2, &spec).unwrap()));

    let v1 = WeightVector::new(vec![1.0]).unwrap();
    let g = GaussPoly::gaussian(1, 1.0).unwrap();
    let p = PositivePoint::new(vec![1.3]).unwrap();
    c.bench_function("transform/gaussian n=1", |b| b.iter(|| fb_numeric(&g, black_box(&p), &v1, &spec).unwrap()));
}

criterion_group!(benches, special_functions, kernel_evaluation, shift_and_transform);
criterion_main!(benches);
