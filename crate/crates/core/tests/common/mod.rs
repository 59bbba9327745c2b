#![allow(dead_code)]

use ssa_core::ssa::{solve_ssa, SsaConfig, SsaProblem, SsaSolution};
use ssa_core::targets::{hp_two_sided, TargetSpec};

/// Quarterly HP trend nowcast of length 101.
pub fn hp1600_spec() -> TargetSpec {
    TargetSpec::new(hp_two_sided(1600.0, 500).unwrap(), 0, 101)
}

pub fn hp1600_problem() -> SsaProblem {
    SsaProblem::from_target(&hp1600_spec()).unwrap()
}

pub fn hp1600_solution(rho1: f64) -> SsaSolution {
    solve_ssa(&hp1600_problem(), &SsaConfig::rho(rho1)).unwrap()
}

/// Band-limited target of length 10 whose first three spectral weights vanish.
pub fn band_limited_problem() -> SsaProblem {
    let basis = ssa_core::eigenpairs(10).unwrap();
    let mut w = vec![0.0; 10];
    for x in w.iter_mut().skip(3) {
        *x = 1.0 / 7f64.sqrt();
    }
    SsaProblem::from_predictor(basis.synthesize(&w).unwrap()).unwrap()
}

/// AR(1) coefficient for monthly log-differenced industrial production.
pub const INDPRO_AR1: f64 = 0.305;
