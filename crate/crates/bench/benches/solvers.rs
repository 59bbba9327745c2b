use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ssa_bench::hp_spec;
use ssa_core::empirics::{apply_filter, generate, SeriesKind};
use ssa_core::integrated::solve_integrated;
use ssa_core::ssa::{solve, SsaConfig, SsaProblem};
use ssa_core::stationary::{solve_ssa_dependent, ProcessModel};
use ssa_core::{eigenpairs, Constraint, IntegratedConfig};

fn white_noise(c: &mut Criterion) {
    let mut group = c.benchmark_group("white_noise_solve");
    for len in [25usize, 101, 401] {
        let problem = SsaProblem::from_target(&hp_spec(1600.0, 500, len)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(len), &problem, |b, p| {
            b.iter(|| solve(black_box(p), &SsaConfig::rho(0.97)).unwrap())
        });
    }
    group.finish();
}

fn eigenbasis(c: &mut Criterion) {
    c.bench_function("eigenpairs_401", |b| b.iter(|| eigenpairs(black_box(401)).unwrap()));
}

fn dependent(c: &mut Criterion) {
    let spec = hp_spec(1600.0, 500, 101);
    let model = ProcessModel::ar1(0.6).unwrap();
    c.bench_function("dependent_solve_ar1", |b| {
        b.iter(|| solve_ssa_dependent(black_box(&spec), &model, &SsaConfig::rho(0.97)).unwrap())
    });
}

fn integrated(c: &mut Criterion) {
    let spec = hp_spec(14400.0, 1500, 201);
    let config = IntegratedConfig::new(1, Constraint::Rho(0.954), ProcessModel::ar1(0.305).unwrap());
    let mut group = c.benchmark_group("integrated");
    group.sample_size(10);
    group.bench_function("i1_solve_201", |b| b.iter(|| solve_integrated(black_box(&spec), &config).unwrap()));
    group.finish();
}

fn filtering(c: &mut Criterion) {
    let x = generate(&SeriesKind::Gaussian, 100_000, 1).unwrap();
    let problem = SsaProblem::from_target(&hp_spec(1600.0, 500, 101)).unwrap();
    let b = solve(&problem, &SsaConfig::rho(0.97)).unwrap().b;
    c.bench_function("apply_filter_101x100k", |bench| {
        bench.iter(|| apply_filter(black_box(&b), black_box(&x)).unwrap())
    });
}

criterion_group!(benches, white_noise, eigenbasis, dependent, integrated, filtering);
criterion_main!(benches);
