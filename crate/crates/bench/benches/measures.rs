//! Hot-path benchmarks: area quadrature, chart inversion, the witness
//! integrals, and mollified section evaluation.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hig_core::{
    dgn_witness, BoxDomain, CharacteristicChart, GraphFunction, HorizontalSection, InitialData,
    QuadratureSpec,
};

fn bench_area(c: &mut Criterion) {
    let g = GraphFunction::dgn(1.0).unwrap();
    let window = BoxDomain::symmetric(2, 1.0).unwrap();
    let spec = QuadratureSpec::fixed(8, 16);
    c.bench_function("area_dgn_order8_16x16", |b| {
        b.iter(|| g.area(black_box(&window), &spec).unwrap())
    });
}

fn bench_invert(c: &mut Criterion) {
    let chart = CharacteristicChart::new(InitialData::tanh_data());
    c.bench_function("chart_invert_tanh", |b| {
        b.iter(|| chart.invert(black_box(1.3), black_box(0.7)).unwrap())
    });
}

fn bench_witness(c: &mut Criterion) {
    c.bench_function("dgn_witness_eps_0.1", |b| {
        b.iter(|| dgn_witness(black_box(4.0), black_box(0.0), 0.1).unwrap())
    });
}

fn bench_mollify(c: &mut Criterion) {
    let section = HorizontalSection::dgn_xyt(1.0).unwrap();
    let mollified = section.mollify(0.25, 2).unwrap();
    let p = [0.4, 0.3, 0.05];
    c.bench_function("mollified_section_eval", |b| {
        b.iter(|| mollified.value(black_box(&p)))
    });
}

criterion_group!(benches, bench_area, bench_invert, bench_witness, bench_mollify);
criterion_main!(benches);
