//! Oracle throughput: the library enumeration (rayon-parallel when the
//! default `parallel` feature is on) against an explicit sequential scan
//! over the same masked polynomial. Build with `--no-default-features` to
//! measure the fully sequential library as well.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use quadchain::bench::{generate_instance, InstanceConfig};
use quadchain::quadratizer::{quadratize, Strategy, TieBreak};
use quadchain::verify::{brute_force_min, check_quadratization, MaskedPoly};

fn bench_brute_force(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_force_min");
    for n in [12u32, 16, 20] {
        let poly = generate_instance(&InstanceConfig::defaults(n, 99)).unwrap();
        group.bench_with_input(BenchmarkId::new("library", n), &poly, |b, poly| {
            b.iter(|| brute_force_min(poly).unwrap())
        });
        let order: Vec<_> = poly.variables().into_iter().collect();
        let masked = MaskedPoly::build(&poly, &order).unwrap();
        group.bench_with_input(BenchmarkId::new("sequential_scan", n), &masked, |b, m| {
            b.iter(|| {
                (0..1u32 << order.len())
                    .map(|s| m.eval(s))
                    .fold(f64::INFINITY, f64::min)
            })
        });
    }
    group.finish();
}

fn bench_check_quadratization(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_quadratization");
    group.sample_size(10);
    for n in [8u32, 10] {
        let poly = generate_instance(&InstanceConfig::defaults(n, 7)).unwrap();
        for strategy in [Strategy::Chain, Strategy::Baseline] {
            let problem = quadratize(&poly, strategy, None, TieBreak::Canonical).unwrap();
            if problem.qubo.variables().len() > 20 {
                continue;
            }
            group.bench_with_input(
                BenchmarkId::new(strategy.to_string(), n),
                &(poly.clone(), problem),
                |b, (poly, problem)| b.iter(|| check_quadratization(poly, problem).unwrap()),
            );
        }
    }
    group.finish();
}

criterion_group!(benches, bench_brute_force, bench_check_quadratization);
criterion_main!(benches);
