use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hardy_core::space::{inner_product, kernel_eval, EntireFunction, EvalConfig};
use hardy_core::{Complex64, WeightSequence};

fn kernel(c: &mut Criterion) {
    let cfg = EvalConfig::default();
    let p = Complex64::new(1.2, -0.7);
    let q = Complex64::new(-0.4, 1.5);
    let mut g = c.benchmark_group("kernel_eval");
    for (name, w) in [
        ("fock", WeightSequence::fock()),
        ("exp_power_2", WeightSequence::exp_power(2.0).unwrap()),
        ("power_factorial_0.75", WeightSequence::power_factorial(0.75).unwrap()),
    ] {
        w.ln_weight(256).unwrap();
        g.bench_function(name, |b| b.iter(|| kernel_eval(black_box(p), black_box(q), &w, &cfg).unwrap()));
    }
    g.finish();
}

fn inner(c: &mut Criterion) {
    let w = WeightSequence::fock();
    let cfg = EvalConfig::default();
    let mut g = c.benchmark_group("inner_product");
    for deg in [8usize, 32, 128] {
        let f = EntireFunction::polynomial((0..=deg).map(|k| Complex64::new(1.0 / (k + 1) as f64, 0.5)).collect());
        let k = EntireFunction::kernel_multiple(Complex64::new(2.0, 0.0), Complex64::new(0.3, 0.9));
        g.bench_with_input(BenchmarkId::new("poly_kernel", deg), &deg, |b, _| {
            b.iter(|| inner_product(black_box(&f), black_box(&k), &w, &cfg).unwrap())
        });
    }
    let k1 = EntireFunction::kernel(Complex64::new(0.5, 0.5));
    let k2 = EntireFunction::kernel_product(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)], Complex64::new(-1.0, 0.2));
    g.bench_function("kernel_kernel", |b| b.iter(|| inner_product(black_box(&k1), black_box(&k2), &w, &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, kernel, inner);
criterion_main!(benches);
