use criterion::{black_box, criterion_group, criterion_main, Criterion};
use kdescent_core::{
    c_constant, equidist_constant, growth_rate, DescentSpec, PhiEvaluator, PhiMode,
};

fn growth(c: &mut Criterion) {
    c.bench_function("growth_rate k5", |b| {
        b.iter(|| growth_rate(black_box(5), 1e-14).unwrap())
    });
}

fn phi(c: &mut Criterion) {
    let series = PhiEvaluator::new(4, PhiMode::Series).unwrap();
    let roots = PhiEvaluator::new(4, PhiMode::RootsOfUnity).unwrap();
    c.bench_function("phi series k4", |b| {
        b.iter(|| series.eval(black_box(0.37)).unwrap())
    });
    c.bench_function("phi roots k4", |b| {
        b.iter(|| roots.eval(black_box(0.37)).unwrap())
    });
}

fn constants(c: &mut Criterion) {
    let spec = DescentSpec::new(3, [1, 5]).unwrap();
    c.bench_function("c_constant k3 {1,5}", |b| {
        b.iter(|| c_constant(black_box(&spec)).unwrap())
    });
    let mut g = c.benchmark_group("equidist");
    g.sample_size(10);
    g.bench_function("k3 a2 100k", |b| {
        b.iter(|| equidist_constant(3, black_box(2), 100_000, 1).unwrap())
    });
    g.finish();
}

criterion_group!(benches, growth, phi, constants);
criterion_main!(benches);
