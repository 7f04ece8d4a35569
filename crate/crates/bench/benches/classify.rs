use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hardy_core::operators::{AffineSymbol, WeightedCompOp};
use hardy_core::space::EntireFunction;
use hardy_core::{classify, classify_pair, ClassifyConfig, Complex64, Property, WeightSequence};

fn classification(c: &mut Criterion) {
    let w = WeightSequence::fock();
    let cfg = ClassifyConfig::default();
    let rotation = WeightedCompOp::composition(AffineSymbol::linear(Complex64::new(0.6, 0.8)).unwrap());
    let shifted = WeightedCompOp::new(
        EntireFunction::kernel_multiple(Complex64::new(1.0, 0.0), Complex64::new(0.3, 0.0)),
        AffineSymbol::new(Complex64::new(0.5, 0.0), Complex64::new(0.3, 0.0)).unwrap(),
    );
    c.bench_function("classify_rotation", |b| b.iter(|| classify(black_box(&rotation), &w, &cfg).unwrap()));
    c.bench_function("classify_kernel_multiplier", |b| b.iter(|| classify(black_box(&shifted), &w, &cfg).unwrap()));
    let adjoint = WeightedCompOp::composition(AffineSymbol::linear(Complex64::new(0.6, -0.8)).unwrap());
    let pair_cfg = ClassifyConfig {
        properties: vec![Property::AdjointPair],
        ..ClassifyConfig::default()
    };
    c.bench_function("classify_pair", |b| {
        b.iter(|| classify_pair(black_box(&rotation), black_box(&adjoint), &w, &pair_cfg).unwrap())
    });
}

criterion_group!(benches, classification);
criterion_main!(benches);
