mod common;

use common::hp1600_spec;
use ssa_core::empirics::{apply_filter, empirical_holding_time, generate, sample_variance, SeriesKind};
use ssa_core::spectral::acf1;
use ssa_core::ssa::SsaConfig;
use ssa_core::stationary::{
    mse_predictor_dependent, solve_ssa_dependent, solve_ssa_extended, wold_weights, ProcessModel,
};
use ssa_core::targets::{hp_two_sided, TargetSpec};

#[test]
fn dependent_mse_predictor_holding_times() {
    // frozen from an independent truncated-series computation of the Wiener-Kolmogorov predictor
    for (a, ht) in [(-0.6, 7.915), (0.0, 8.138), (0.6, 9.189)] {
        let model = ProcessModel::ar1(a).unwrap();
        let sol = solve_ssa_dependent(&hp1600_spec(), &model, &SsaConfig::rho(0.97)).unwrap();
        assert!((sol.mse_diagnostics.holding_time - ht).abs() < 1e-3, "a = {a}");
        assert!(sol.mse_diagnostics.target_correlation >= sol.solution.diagnostics.target_correlation);
        assert!(sol.mse_diagnostics.target_correlation >= sol.classic_diagnostics.target_correlation - 1e-12);
    }
}

#[test]
fn white_noise_model_reduces_to_the_nowcast() {
    let spec = hp1600_spec();
    let gamma = mse_predictor_dependent(&spec, &ProcessModel::white_noise()).unwrap();
    assert_eq!(gamma, spec.mse_nowcast().unwrap());
}

#[test]
fn innovation_representation_matches_simulation() {
    let model = ProcessModel::ar1(0.6).unwrap();
    let sol = solve_ssa_dependent(&hp1600_spec(), &model, &SsaConfig::rho(0.97)).unwrap();
    // Ξ b_x reproduces b_ε
    let xi = wold_weights(&model, 101);
    for (k, be) in sol.b_eps.iter().enumerate() {
        let conv: f64 = (0..=k).map(|j| xi[j] * sol.b_x[k - j]).sum();
        assert!((conv - be).abs() < 1e-10);
    }
    let x = generate(&SeriesKind::Ar1 { a: 0.6 }, 1_000_000, 21).unwrap();
    let y = apply_filter(&sol.b_x, &x).unwrap();
    let var = sample_variance(&y);
    let theory: f64 = sol.b_eps.iter().map(|b| b * b).sum();
    assert!((var / theory - 1.0).abs() < 0.02, "{var} vs {theory}");
    let ht = empirical_holding_time(&y).unwrap();
    assert!((ht - 12.793).abs() < 0.3, "{ht}");
}

#[test]
fn extended_solution_is_stable_in_the_innovation_length() {
    let spec = TargetSpec::new(hp_two_sided(1600.0, 500).unwrap(), 0, 50);
    let model = ProcessModel::ar1(0.95).unwrap();
    let cfg = SsaConfig::rho(0.9);
    let short = solve_ssa_extended(&spec, &model, &cfg, 400).unwrap();
    let long = solve_ssa_extended(&spec, &model, &cfg, 800).unwrap();
    let gap = short
        .b_x
        .iter()
        .zip(&long.b_x)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let size = long.b_x.iter().map(|b| b.abs()).fold(0.0, f64::max);
    assert!(gap < 1e-6 * size, "max gap {gap}");
    assert!((acf1(&long.b_eps) - 0.9).abs() < 1e-8);
    assert!(solve_ssa_extended(&spec, &model, &cfg, 40).is_err());
}

#[test]
fn model_json_and_validation() {
    let m = ProcessModel::from_json(r#"{"ar":[0.5,-0.2],"ma":[0.4]}"#).unwrap();
    assert_eq!(m.ma, vec![0.4]);
    assert_eq!(ProcessModel::from_json(r#"{"ar":[0.5,0.6]}"#).unwrap_err().code(), "model");
}
