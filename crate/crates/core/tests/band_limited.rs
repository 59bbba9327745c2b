//! Targets whose spectral weights vanish on the leading eigenvectors.
//!
//! Frozen optima come from a sequential quadratic programming solve of the
//! same problem (maximize `b'γ` subject to `b'b = 1` and `b'Mb = ρ_1`).

mod common;

use common::band_limited_problem;
use ssa_core::spectral::acf1;
use ssa_core::ssa::{solve, solve_completed, solve_ssa, SolutionKind, SsaConfig};

#[test]
fn completed_optimum_at_high_correlation() {
    let p = band_limited_problem();
    let s = solve_completed(&p, &SsaConfig::rho(0.6)).unwrap();
    assert!((s.diagnostics.criterion_value - 0.572969).abs() < 1e-5);
    match s.kind {
        SolutionKind::Completed { i0, n_tilde } => {
            assert_eq!(i0, 0);
            assert!((n_tilde - 0.614990).abs() < 1e-5);
        }
        k => panic!("unexpected {k:?}"),
    }
    assert!((acf1(&s.b) - 0.6).abs() < 1e-10);
    // the uncompleted solver cannot reach this correlation
    assert_eq!(solve_ssa(&p, &SsaConfig::rho(0.6)).unwrap_err().code(), "constraint-infeasible");
    assert_eq!(solve(&p, &SsaConfig::rho(0.6)).unwrap().b, s.b);
}

#[test]
fn completed_optimum_at_moderate_correlation() {
    let p = band_limited_problem();
    let s = solve_completed(&p, &SsaConfig::rho(0.365)).unwrap();
    assert!((s.diagnostics.criterion_value - 0.736817).abs() < 1e-5);
    if let SolutionKind::Completed { n_tilde, .. } = s.kind {
        assert!((n_tilde - 0.35661).abs() < 1e-4);
    } else {
        panic!("expected completion, got {:?}", s.kind);
    }
    let s = solve_completed(&p, &SsaConfig::rho(0.3)).unwrap();
    assert!((s.diagnostics.criterion_value - 0.77605).abs() < 1e-5);
}

#[test]
fn agrees_with_uncompleted_solver_where_it_is_feasible() {
    let p = band_limited_problem();
    for rho1 in [-0.8, -0.4, 0.0, 0.03, 0.07] {
        let plain = solve_ssa(&p, &SsaConfig::rho(rho1)).unwrap();
        let completed = solve_completed(&p, &SsaConfig::rho(rho1)).unwrap();
        assert!(
            (plain.diagnostics.criterion_value - completed.diagnostics.criterion_value).abs() < 1e-9,
            "rho1 = {rho1}"
        );
    }
}
