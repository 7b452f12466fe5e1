use std::hint::black_box;
use std::sync::Arc;

use arsel_bench::mdep_path;
use arsel_core::criteria::{self, Criterion};
use arsel_core::estimator::{self, FitWindow};
use arsel_core::linalg;
use arsel_core::{PopulationModel, ProcessSpec};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion as Bench};

fn levinson(c: &mut Bench) {
    let x = mdep_path(4000, 0);
    let mut group = c.benchmark_group("levinson_durbin");
    for k in [30usize, 200, 920] {
        let gamma = estimator::autocov_hat_all(&x, k).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(k), &gamma, |b, g| {
            b.iter(|| linalg::levinson_durbin(black_box(g), k).unwrap())
        });
    }
    group.finish();
}

fn paper_window_fit(c: &mut Bench) {
    let mut group = c.benchmark_group("paper_window_fit_all_orders");
    for n in [500usize, 2000, 8000] {
        let x = mdep_path(n, 1);
        let window = FitWindow::paper_default(n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| {
            b.iter(|| estimator::fit_all_orders(black_box(x), window, window.k_n()).unwrap())
        });
    }
    group.finish();
}

fn figure_prefix(c: &mut Bench) {
    let x = mdep_path(1840, 2);
    c.bench_function("toeplitz_fit_and_aic_t1840", |b| {
        b.iter(|| {
            let k_max = 920;
            let fit = estimator::fit_all_orders(black_box(&x), FitWindow::toeplitz_full(1840).unwrap(), k_max).unwrap();
            criteria::select(Criterion::AicLog, &fit, k_max).unwrap().k_hat
        })
    });
}

fn simulation(c: &mut Bench) {
    let mut group = c.benchmark_group("simulate_n2000");
    let designs = [
        ("mdep5", ProcessSpec::mdep_design(5).unwrap()),
        ("garch_p2", ProcessSpec::garch_design(2.0).unwrap()),
    ];
    for (name, spec) in designs {
        let spec = Arc::new(spec);
        group.bench_function(name, |b| {
            let mut run = 0;
            b.iter(|| {
                run += 1;
                spec.simulate(2000, 1, run).unwrap()
            })
        });
    }
    group.finish();
}

fn population(c: &mut Bench) {
    let spec = ProcessSpec::mdep_design(5).unwrap();
    c.bench_function("population_model_j4", |b| {
        b.iter(|| PopulationModel::from_spec(black_box(&spec)).unwrap())
    });
}

criterion_group!(
    benches,
    levinson,
    paper_window_fit,
    figure_prefix,
    simulation,
    population
);
criterion_main!(benches);
