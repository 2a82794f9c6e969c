use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use kdescent_core::{
    build_triangle, count_with_set, enumerate_table, verify_gen_identity, DescentSpec,
    GeneralTable, PatternQuery,
};

fn triangle(c: &mut Criterion) {
    let mut g = c.benchmark_group("triangle");
    for n in [60, 200] {
        g.bench_with_input(BenchmarkId::new("k3", n), &n, |b, &n| {
            b.iter(|| build_triangle(3, black_box(n)).unwrap())
        });
    }
    g.finish();
}

fn set_counts(c: &mut Criterion) {
    let spec = DescentSpec::new(3, [200]).unwrap();
    c.bench_function("count_with_set k3 n400", |b| {
        b.iter(|| count_with_set(black_box(&spec), 400))
    });
    let pair = DescentSpec::new(3, [1, 4]).unwrap();
    c.bench_function("general_table k3 {1,4} N60", |b| {
        b.iter(|| GeneralTable::build(black_box(&pair), 60).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    let query = PatternQuery::k_descent(3, 9).unwrap();
    g.bench_function("k3 n9", |b| {
        b.iter(|| enumerate_table(black_box(&query)).unwrap())
    });
    g.finish();
}

fn series(c: &mut Criterion) {
    let t = build_triangle(3, 24).unwrap();
    c.bench_function("gen identity cap24", |b| {
        b.iter(|| verify_gen_identity(black_box(&t), 24).unwrap())
    });
}

criterion_group!(benches, triangle, set_counts, oracle, series);
criterion_main!(benches);
