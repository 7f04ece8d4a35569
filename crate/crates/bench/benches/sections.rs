use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hardy_core::operators::{section_norm_growth, weighted_comp_section, AffineSymbol, WeightedCompOp};
use hardy_core::space::EntireFunction;
use hardy_core::{Complex64, WeightSequence};

fn sections(c: &mut Criterion) {
    let w = WeightSequence::fock();
    let phi = AffineSymbol::new(Complex64::new(0.6, 0.3), Complex64::new(0.2, -0.1)).unwrap();
    let ops = [
        ("composition", WeightedCompOp::composition(phi)),
        ("constant", WeightedCompOp::new(EntireFunction::constant(Complex64::new(0.0, 2.0)), phi)),
        (
            "kernel_multiple",
            WeightedCompOp::new(EntireFunction::kernel_multiple(Complex64::new(1.5, 0.0), Complex64::new(0.2, 0.4)), phi),
        ),
    ];
    let mut g = c.benchmark_group("weighted_comp_section");
    for (name, op) in &ops {
        for n in [16usize, 32, 64] {
            g.bench_with_input(BenchmarkId::new(*name, n), &n, |b, &n| {
                b.iter(|| weighted_comp_section(black_box(op), n, &w).unwrap())
            });
        }
    }
    g.finish();
}

fn norm_growth(c: &mut Criterion) {
    let w = WeightSequence::fock();
    let op = WeightedCompOp::composition(AffineSymbol::unvalidated(Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)));
    c.bench_function("section_norm_growth_8_16_32", |b| {
        b.iter(|| section_norm_growth(black_box(&op), &[8, 16, 32], &w).unwrap())
    });
}

criterion_group!(benches, sections, norm_growth);
criterion_main!(benches);
