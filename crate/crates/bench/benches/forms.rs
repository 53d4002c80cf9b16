use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use phiform_bench::{charges, params, spec};
use phiform_core::charges::{default_mellin_grid, mellin_transform};
use phiform_core::momentum_forms::phi_total;
use phiform_core::position_forms::position_breakdown;
use phiform_core::specfun::{macdonald_imag_order, symbol_s, SymbolParams};
use phiform_core::stability::{collapse_sweep, leading_coefficient, min_symbol};

fn special_functions(c: &mut Criterion) {
    let p = SymbolParams::new(0.5).unwrap();
    c.bench_function("symbol_s", |b| b.iter(|| symbol_s(black_box(3.7), p).unwrap()));
    c.bench_function("macdonald_imag_order", |b| {
        b.iter(|| macdonald_imag_order(black_box(7.3)).unwrap())
    });
    c.bench_function("min_symbol", |b| b.iter(|| min_symbol(black_box(0.5), 20.0, 2001).unwrap()));
}

fn forms(c: &mut Criterion) {
    let sp = spec();
    let p = params(0.5, 1.0);
    let mut group = c.benchmark_group("phi_total");
    group.sample_size(10);
    for (label, f) in charges() {
        group.bench_with_input(BenchmarkId::new("momentum", label), &f, |b, f| {
            b.iter(|| phi_total(f, &p, &sp).unwrap())
        });
    }
    let (label, f) = &charges()[0];
    group.bench_with_input(BenchmarkId::new("position", label), f, |b, f| {
        b.iter(|| position_breakdown(f, 1.0, 0.5, &sp).unwrap())
    });
    group.finish();
}

fn mellin(c: &mut Criterion) {
    let sp = spec();
    let mut group = c.benchmark_group("mellin");
    group.sample_size(10);
    for (label, f) in charges() {
        let (extent, step) = default_mellin_grid(&f);
        group.bench_with_input(BenchmarkId::new("transform", label), &f, |b, f| {
            b.iter(|| mellin_transform(f, extent, step, &sp).unwrap())
        });
    }
    group.bench_function("leading_coefficient", |b| {
        b.iter(|| leading_coefficient(black_box(0.3), 0.5, &sp).unwrap())
    });
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let sp = spec();
    let p = params(0.5, 1.0);
    let n: Vec<u32> = (1..=8).collect();
    let mut group = c.benchmark_group("collapse");
    group.sample_size(10);
    group.bench_function("sweep_1_to_8", |b| b.iter(|| collapse_sweep(0.3, &p, &n, &sp).unwrap()));
    group.finish();
}

criterion_group!(benches, special_functions, forms, mellin, sweep);
criterion_main!(benches);
