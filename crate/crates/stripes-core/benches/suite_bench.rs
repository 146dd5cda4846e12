//! Compares the data-parallel suite runner against the sequential
//! fallback on the same workload. With the `parallel` feature (default),
//! `run` fans cases out across threads; `run_sequential` always stays on
//! one. Reports are checked identical before timing.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stripes_core::suite::{run, run_sequential, SuiteConfig};

fn bench_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    for cases in [20usize, 60] {
        let config = SuiteConfig { cases, seed: 1, ..SuiteConfig::default() };
        assert_eq!(run(&config), run_sequential(&config));
        group.bench_with_input(BenchmarkId::new("parallel", cases), &config, |b, cfg| {
            b.iter(|| run(cfg))
        });
        group.bench_with_input(BenchmarkId::new("sequential", cases), &config, |b, cfg| {
            b.iter(|| run_sequential(cfg))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_suite);
criterion_main!(benches);
