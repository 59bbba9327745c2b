mod common;

use common::INDPRO_AR1;
use ssa_core::empirics::{apply_filter, generate, sample_variance, SeriesKind};
use ssa_core::integrated::{level_and_slope, solve_integrated, IntegratedSystem};
use ssa_core::stationary::{mse_predictor_integrated, ProcessModel};
use ssa_core::targets::{hp_two_sided, TargetSpec};
use ssa_core::{Constraint, IntegratedConfig};

fn indpro_system(rho1: f64) -> IntegratedSystem {
    let spec = TargetSpec::new(hp_two_sided(14400.0, 1500).unwrap(), 0, 201);
    let model = ProcessModel::ar1(INDPRO_AR1).unwrap();
    let gamma = mse_predictor_integrated(&spec, &model, 1).unwrap();
    IntegratedSystem::new(gamma, &model, 1, 402, rho1).unwrap()
}

#[test]
fn benchmark_error_grows_with_the_multiplier() {
    let sys = indpro_system(0.954);
    let mut last = 0.0;
    for lambda in [0.0, -1.0, -10.0, -50.0, -100.0] {
        let mse = sys.mse(&sys.b_x(lambda).unwrap());
        assert!(mse >= last, "lambda = {lambda}");
        last = mse;
    }
    let sol = sys.solve().unwrap();
    assert!(sol.roots.contains(&sol.lambda_tilde));
    assert!(sol.diagnostics.condition_number < 1e12);
    assert!(sol.diagnostics.ht_of_diff > sol.diagnostics.benchmark_ht_of_diff);
}

#[test]
fn error_against_benchmark_is_stationary() {
    let sol = indpro_system(0.954).solve().unwrap();
    let spec = TargetSpec::new(hp_two_sided(14400.0, 1500).unwrap(), 0, 201);
    let model = ProcessModel::ar1(INDPRO_AR1).unwrap();
    let gamma = mse_predictor_integrated(&spec, &model, 1).unwrap();
    let diff: Vec<f64> = gamma.iter().zip(&sol.b_x).map(|(g, b)| g - b).collect();
    let x = generate(&SeriesKind::Arima { model, d: 1 }, 200_000, 5).unwrap();
    let e = apply_filter(&diff, &x).unwrap();
    let (first, second) = e.split_at(e.len() / 2);
    let ratio = sample_variance(first) / sample_variance(second);
    assert!((0.85..1.0 / 0.85).contains(&ratio), "{ratio}");
    assert!((sample_variance(&e) / sol.diagnostics.mse_vs_benchmark - 1.0).abs() < 0.05);
}

#[test]
fn i2_design_pins_level_and_slope() {
    let spec = TargetSpec::new(hp_two_sided(1600.0, 500).unwrap(), 0, 60);
    let config = IntegratedConfig::new(2, Constraint::Rho(0.9), ProcessModel::ar1(0.2).unwrap());
    let sol = solve_integrated(&spec, &config).unwrap();
    let (level, slope) = level_and_slope(&sol.b_x);
    assert!((level - sol.gamma0).abs() < 1e-12);
    assert!((slope - sol.gamma0_dot.unwrap()).abs() < 1e-11);
    assert!(sol.residual < 1e-8);
    assert_eq!(sol.b_eps.len(), 120);
}

#[test]
fn rejects_unsupported_orders() {
    let spec = TargetSpec::new(hp_two_sided(1600.0, 500).unwrap(), 0, 20);
    let config = IntegratedConfig::new(3, Constraint::Rho(0.5), ProcessModel::white_noise());
    assert!(solve_integrated(&spec, &config).is_err());
}
