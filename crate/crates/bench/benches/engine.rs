use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fedosov_bench::{chart, sample_pair, solve};
use fedosov_core::fedosov::{FedosovSolution, LambdaSeries, Omega, Truncation};
use fedosov_core::geometry::Builtin;
use fedosov_core::scalar::int;
use fedosov_core::verify::oracle_flat_star;

fn connection_forms(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for n in [2u32, 3] {
        let chart = chart(Builtin::FubiniStudy, n);
        group.bench_with_input(BenchmarkId::new("fubini_study", n), &n, |b, &n| {
            b.iter(|| FedosovSolution::solve(&chart, None, int(1), Omega::zero(1), Truncation::new(n)).unwrap())
        });
    }
    group.finish();
}

fn star_products(c: &mut Criterion) {
    let (f, g) = sample_pair(1);
    let (f, g) = (LambdaSeries::classical(f), LambdaSeries::classical(g));
    let mut group = c.benchmark_group("star");
    group.sample_size(10);
    for which in [Builtin::Flat, Builtin::FubiniStudy] {
        // a fresh solution per iteration keeps the Taylor-lift memo cold
        group.bench_function(which.name(), |b| {
            b.iter_batched(
                || solve(which, 2, int(1)),
                |sol| sol.star(&f, &g).unwrap(),
                criterion::BatchSize::LargeInput,
            )
        });
    }
    group.bench_function("flat_oracle", |b| {
        b.iter(|| oracle_flat_star(&f.coeff(0), &g.coeff(0), &int(1), 2).unwrap())
    });
    group.finish();
}

fn taylor_lifts(c: &mut Criterion) {
    let (f, _) = sample_pair(2);
    let f = LambdaSeries::classical(f);
    let mut group = c.benchmark_group("taylor");
    group.sample_size(10);
    group.bench_function("fubini_study_n2", |b| {
        b.iter_batched(
            || solve(Builtin::FubiniStudy, 2, int(1)),
            |sol| sol.taylor(&f).unwrap(),
            criterion::BatchSize::LargeInput,
        )
    });
    group.finish();
}

criterion_group!(benches, connection_forms, star_products, taylor_lifts);
criterion_main!(benches);
