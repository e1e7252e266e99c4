//! End-to-end compilation throughput for both strategies, plus a small
//! benchmark-harness run. The harness fans instances out over rayon when
//! the default `parallel` feature is enabled; rebuild with
//! `--no-default-features` for the sequential comparison point.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use quadchain::bench::{generate_instance, run_benchmark, BenchConfig, InstanceConfig};
use quadchain::compiler::{compile_qaoa, QaoaParams};
use quadchain::device::ibm_torino;
use quadchain::quadratizer::{quadratize, Strategy, TieBreak};

fn bench_compile(c: &mut Criterion) {
    let map = ibm_torino();
    let params = QaoaParams::single(0.4, 0.3);
    let mut group = c.benchmark_group("compile_qaoa");
    for n in [8u32, 12, 16] {
        let poly = generate_instance(&InstanceConfig::defaults(n, 5)).unwrap();
        for strategy in [Strategy::Chain, Strategy::Baseline] {
            group.bench_with_input(
                BenchmarkId::new(strategy.to_string(), n),
                &poly,
                |b, poly| {
                    b.iter(|| {
                        let problem =
                            quadratize(poly, strategy, None, TieBreak::Canonical).unwrap();
                        compile_qaoa(&problem, &map, &params, strategy).unwrap()
                    })
                },
            );
        }
    }
    group.finish();
}

fn bench_harness(c: &mut Criterion) {
    let map = ibm_torino();
    let mut group = c.benchmark_group("run_benchmark");
    group.sample_size(10);
    group.bench_function("sizes_8_10_x4", |b| {
        b.iter(|| run_benchmark(&BenchConfig::new(vec![8, 10], 4, 17), &map))
    });
    group.finish();
}

criterion_group!(benches, bench_compile, bench_harness);
criterion_main!(benches);
