use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hpquad::{build_tables, simpson_adaptive, AdaptiveConfig, HpIntegrator, Preset};

fn hp(c: &mut Criterion) {
    // tables are built once, outside the timed region
    let integrator = HpIntegrator::new(AdaptiveConfig::default()).unwrap();
    let mut group = c.benchmark_group("hp");
    for p in Preset::ALL {
        let (a, b) = p.interval();
        group.bench_with_input(BenchmarkId::from_parameter(p), &p, |bench, p| {
            bench.iter(|| {
                integrator
                    .integrate(p, black_box(a), black_box(b))
                    .unwrap()
                    .value
            })
        });
    }
    group.finish();
}

fn simpson(c: &mut Criterion) {
    let tol = AdaptiveConfig::default().tol;
    let mut group = c.benchmark_group("simpson");
    group.sample_size(20);
    for p in Preset::ALL {
        let (a, b) = p.interval();
        group.bench_with_input(BenchmarkId::from_parameter(p), &p, |bench, p| {
            bench.iter(|| {
                simpson_adaptive(p.function(), black_box(a), black_box(b), tol)
                    .unwrap()
                    .value
            })
        });
    }
    group.finish();
}

fn tables(c: &mut Criterion) {
    c.bench_function("build_tables/15", |bench| {
        bench.iter(|| build_tables(black_box(15)).unwrap())
    });
}

criterion_group!(benches, hp, simpson, tables);
criterion_main!(benches);
