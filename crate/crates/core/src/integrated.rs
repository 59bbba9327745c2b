//! SSA for integrated data of order one or two.
//!
//! The filter `b_x` must reproduce the level (and for `d = 2` the slope) of
//! the MSE benchmark so that the filter error stays stationary. Writing
//! `b_x = c + B b̃` enforces these cointegration constraints exactly; the
//! free part `b̃` trades tracking error against the lag-one autocorrelation
//! of the `d`-th differenced output through a multiplier `λ̃`:
//!
//! ```text
//! b̃(λ̃) = (B'Ξ̃'Ξ̃B + λ̃ B'Ξ'VΞB)⁻¹ (B'Ξ̃'(Ξ̃γ − Ξ̃c) − λ̃ B'Ξ'VΞc),   V = M − ρ_1 I
//! ```
//!
//! where `Ξ` convolves with the Wold weights of the differenced data and
//! `Ξ̃ = ΞΣ^d` with the summation matrix `Σ`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SsaError};
use crate::linalg::{condition_number, solve_refined};
use crate::series;
use crate::spectral::{acf1, build_m};
use crate::ssa::Constraint;
use crate::stationary::{mse_predictor_integrated, wold_weights, ProcessModel, WoldMatrix};
use crate::targets::TargetSpec;

/// Condition number above which a warning is logged.
pub const CONDITION_WARN: f64 = 1e12;
/// Accuracy of the multiplier search on the lag-one autocorrelation.
pub const LAMBDA_TOL: f64 = 1e-10;

/// Summation matrix `Σ` (lower-triangular ones) and its inverse, the difference matrix `Δ`.
pub fn sigma_delta_matrices(len: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if len == 0 {
        return Err(SsaError::InvalidDimension("length must be at least 1".into()));
    }
    let sigma = DMatrix::from_fn(len, len, |i, j| if i >= j { 1.0 } else { 0.0 });
    let delta = DMatrix::from_fn(len, len, |i, j| {
        if i == j {
            1.0
        } else if i == j + 1 {
            -1.0
        } else {
            0.0
        }
    });
    Ok((sigma, delta))
}

/// `L × (L−d)` basis of filters that change neither the level (`d ≥ 1`) nor the slope (`d = 2`).
pub fn b_matrix(len: usize, d: usize) -> Result<DMatrix<f64>> {
    check_order(d)?;
    if len <= d {
        return Err(SsaError::InvalidDimension(format!(
            "length {len} must exceed the integration order {d}"
        )));
    }
    let cols = len - d;
    Ok(DMatrix::from_fn(len, cols, |i, j| match (d, i) {
        (1, 0) => -1.0,
        (2, 0) => (j + 1) as f64,
        (2, 1) => -((j + 2) as f64),
        _ => {
            if i == j + d {
                1.0
            } else {
                0.0
            }
        }
    }))
}

fn check_order(d: usize) -> Result<()> {
    if d == 1 || d == 2 {
        Ok(())
    } else {
        Err(SsaError::InvalidDimension(format!(
            "integration order must be 1 or 2, got {d}"
        )))
    }
}

/// Level `Γ(0) = Σ γ_k` and slope `Γ̇(0) = Σ k γ_k` of a causal filter.
pub fn level_and_slope(gamma: &[f64]) -> (f64, f64) {
    gamma
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(l, s), (k, g)| (l + g, s + k as f64 * g))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratedConfig {
    /// Integration order, 1 or 2.
    pub d: usize,
    /// Constraint on the `d`-th differences of the output.
    pub constraint: Constraint,
    /// Rows of the truncated Wold matrices; defaults to `2L`.
    pub len_tilde: Option<usize>,
    /// Model of the `d`-th differences of the data.
    pub model: ProcessModel,
}

impl IntegratedConfig {
    pub fn new(d: usize, constraint: Constraint, model: ProcessModel) -> Self {
        Self {
            d,
            constraint,
            len_tilde: None,
            model,
        }
    }

    pub fn with_len_tilde(mut self, len_tilde: usize) -> Self {
        self.len_tilde = Some(len_tilde);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratedDiagnostics {
    /// Lag-one autocorrelation of the differenced output in innovation space.
    pub acf1_of_diff: f64,
    pub ht_of_diff: f64,
    /// Same quantities for the MSE benchmark.
    pub benchmark_acf1_of_diff: f64,
    pub benchmark_ht_of_diff: f64,
    /// Variance of the difference between benchmark and filter output.
    pub mse_vs_benchmark: f64,
    pub condition_number: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratedSolution {
    pub d: usize,
    pub rho1: f64,
    /// Filter applied to the (undifferenced) series.
    pub b_x: Vec<f64>,
    /// `Ξ b_x`: the differenced output in terms of innovations (`L̃` terms).
    pub b_eps: Vec<f64>,
    pub lambda_tilde: f64,
    /// Every root found by the multiplier scan.
    pub roots: Vec<f64>,
    pub gamma0: f64,
    pub gamma0_dot: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub diagnostics: IntegratedDiagnostics,
}

impl IntegratedSolution {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> std::io::Result<()> {
        crate::io::write_lag_weight_csv(out, (0i64..).zip(self.b_x.iter().copied()))
    }
}

/// Error variance `‖Ξ̃(γ − b_x)‖²` of `b_x` relative to the benchmark `γ`.
pub fn mse_vs_benchmark(b_x: &[f64], gamma_mse: &[f64], xi_tilde: &DMatrix<f64>) -> f64 {
    let e = DVector::from_iterator(
        gamma_mse.len(),
        gamma_mse.iter().zip(b_x).map(|(g, b)| g - b),
    );
    (xi_tilde * e).norm_squared()
}

/// Precomputed matrices of the Lagrangian system for a fixed benchmark and constraint.
#[derive(Debug, Clone)]
pub struct IntegratedSystem {
    pub d: usize,
    pub rho1: f64,
    pub gamma_mse: Vec<f64>,
    pub gamma0: f64,
    pub gamma0_dot: f64,
    /// `Ξ`, `L̃ × L`.
    pub xi: DMatrix<f64>,
    /// `Ξ̃ = ΞΣ^d`, `L̃ × L`.
    pub xi_tilde: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DVector<f64>,
    a1: DMatrix<f64>,
    a2: DMatrix<f64>,
    r1: DVector<f64>,
    r2: DVector<f64>,
}

impl IntegratedSystem {
    pub fn new(gamma_mse: Vec<f64>, model: &ProcessModel, d: usize, len_tilde: usize, rho1: f64) -> Result<Self> {
        check_order(d)?;
        let len = gamma_mse.len();
        let min_len = d + 2;
        if len < min_len {
            return Err(SsaError::InvalidDimension(format!(
                "order {d} needs a filter length of at least {min_len}, got {len}"
            )));
        }
        if len_tilde < len {
            return Err(SsaError::InvalidDimension(format!(
                "L_tilde = {len_tilde} is shorter than L = {len}"
            )));
        }
        if !(rho1 > -1.0 && rho1 < 1.0) {
            return Err(SsaError::domain(rho1, "rho1 must lie in (-1, 1)"));
        }
        let xi_w = wold_weights(model, len_tilde);
        let xi = WoldMatrix::from_weights(xi_w.clone(), len_tilde, len).to_dense();
        let xi_tilde =
            WoldMatrix::from_weights(series::integrate(&xi_w, d, len_tilde), len_tilde, len).to_dense();

        let (gamma0, gamma0_dot) = level_and_slope(&gamma_mse);
        let mut c = DVector::zeros(len);
        if d == 1 {
            c[0] = gamma0;
        } else {
            c[0] = gamma0 - gamma0_dot;
            c[1] = gamma0_dot;
        }
        let b = b_matrix(len, d)?;
        let mut v = build_m(len_tilde)?;
        for i in 0..len_tilde {
            v[(i, i)] -= rho1;
        }
        let g = DVector::from_column_slice(&gamma_mse);
        let xtb = &xi_tilde * &b;
        let xb = &xi * &b;
        let vxb = &v * &xb;
        let a1 = xtb.tr_mul(&xtb);
        let a2 = xb.tr_mul(&vxb);
        let r1 = xtb.tr_mul(&(&xi_tilde * (&g - &c)));
        let r2 = vxb.tr_mul(&(&xi * &c));
        Ok(Self {
            d,
            rho1,
            gamma_mse,
            gamma0,
            gamma0_dot,
            xi,
            xi_tilde,
            b,
            c,
            a1,
            a2,
            r1,
            r2,
        })
    }

    pub fn len(&self) -> usize {
        self.gamma_mse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma_mse.is_empty()
    }

    fn system(&self, lambda: f64) -> DMatrix<f64> {
        &self.a1 + lambda * &self.a2
    }

    /// `b_x(λ̃) = c + B b̃(λ̃)`.
    pub fn b_x(&self, lambda: f64) -> Result<Vec<f64>> {
        let rhs = &self.r1 - lambda * &self.r2;
        let bt = solve_refined(&self.system(lambda), &rhs)?;
        Ok((&self.c + &self.b * bt).iter().copied().collect())
    }

    /// Differenced output in innovation space, `Ξ b_x`.
    pub fn b_eps(&self, b_x: &[f64]) -> Vec<f64> {
        (&self.xi * DVector::from_column_slice(b_x)).iter().copied().collect()
    }

    /// `ρ(Ξ b_x(λ̃)) − ρ_1`.
    pub fn residual(&self, lambda: f64) -> Result<f64> {
        let r = acf1(&self.b_eps(&self.b_x(lambda)?)) - self.rho1;
        if r.is_finite() {
            Ok(r)
        } else {
            Err(SsaError::Singular(format!("non-finite residual at lambda = {lambda}")))
        }
    }

    pub fn mse(&self, b_x: &[f64]) -> f64 {
        mse_vs_benchmark(b_x, &self.gamma_mse, &self.xi_tilde)
    }

    fn residual_perturbed(&self, lambda: f64) -> Option<f64> {
        self.residual(lambda)
            .or_else(|_| self.residual(lambda * (1.0 + 1e-7) + 1e-12))
            .ok()
    }

    /// Scans `λ̃` over a two-sided logarithmic grid, refines every sign change and keeps the root with the lowest error.
    pub fn solve(&self) -> Result<IntegratedSolution> {
        let mut grid: Vec<f64> = Vec::new();
        let decades = (-4..=10).flat_map(|e| (0..8).map(move |s| 10f64.powf(e as f64 + s as f64 / 8.0)));
        let pos: Vec<f64> = decades.collect();
        grid.extend(pos.iter().rev().map(|x| -x));
        grid.push(0.0);
        grid.extend(pos.iter().copied());

        let values: Vec<(f64, Option<f64>)> =
            grid.iter().map(|&l| (l, self.residual_perturbed(l))).collect();
        let mut roots = Vec::new();
        let mut iterations = values.len();
        for w in values.windows(2) {
            let ((l0, f0), (l1, f1)) = (w[0], w[1]);
            let (Some(f0), Some(f1)) = (f0, f1) else {
                continue;
            };
            if f0 == 0.0 {
                roots.push(l0);
                continue;
            }
            if f0.signum() == f1.signum() || f1 == 0.0 {
                continue;
            }
            let (mut lo, mut hi, mut flo) = (l0, l1, f0);
            let mut root = None;
            for _ in 0..200 {
                iterations += 1;
                let mid = 0.5 * (lo + hi);
                let Some(fm) = self.residual_perturbed(mid) else {
                    break;
                };
                if fm.abs() <= LAMBDA_TOL {
                    root = Some(mid);
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
                if (hi - lo).abs() <= 4.0 * f64::EPSILON * mid.abs().max(1e-300) {
                    // interval collapsed; keep it only if it is a genuine root, not a pole
                    if fm.abs() <= 1e-8 {
                        root = Some(mid);
                    }
                    break;
                }
            }
            if let Some(r) = root {
                roots.push(r);
            }
        }
        if let Some(&(l, Some(f))) = values.last() {
            if f == 0.0 {
                roots.push(l);
            }
        }
        let mut best: Option<(f64, Vec<f64>, f64)> = None;
        for &r in &roots {
            let bx = self.b_x(r)?;
            let mse = self.mse(&bx);
            if best.as_ref().is_none_or(|b| mse < b.2) {
                best = Some((r, bx, mse));
            }
        }
        let (lambda, b_x, mse) = best.ok_or_else(|| {
            SsaError::Infeasible(format!(
                "no multiplier attains rho1 = {} on the differenced output",
                self.rho1
            ))
        })?;
        if roots.len() > 1 {
            log::info!("multiplier scan found {} roots: {roots:?}", roots.len());
        }
        let cond = condition_number(&self.system(lambda));
        if cond > CONDITION_WARN {
            log::warn!("system matrix condition number {cond:e} at lambda = {lambda}");
        }
        let b_eps = self.b_eps(&b_x);
        let acf = acf1(&b_eps);
        let bench = acf1(&self.b_eps(&self.gamma_mse));
        let ht = |r: f64| std::f64::consts::PI / r.clamp(-1.0, 1.0).acos();
        Ok(IntegratedSolution {
            d: self.d,
            rho1: self.rho1,
            residual: (acf - self.rho1).abs(),
            diagnostics: IntegratedDiagnostics {
                acf1_of_diff: acf,
                ht_of_diff: ht(acf),
                benchmark_acf1_of_diff: bench,
                benchmark_ht_of_diff: ht(bench),
                mse_vs_benchmark: mse,
                condition_number: cond,
            },
            b_x,
            b_eps,
            lambda_tilde: lambda,
            roots,
            gamma0: self.gamma0,
            gamma0_dot: (self.d == 2).then_some(self.gamma0_dot),
            iterations,
        })
    }
}

/// Integrated SSA of order `config.d` for the target's MSE benchmark.
pub fn solve_integrated(target: &TargetSpec, config: &IntegratedConfig) -> Result<IntegratedSolution> {
    check_order(config.d)?;
    let rho1 = config.constraint.rho1()?;
    let gamma = mse_predictor_integrated(target, &config.model, config.d)?;
    let len_tilde = config.len_tilde.unwrap_or(2 * target.len);
    IntegratedSystem::new(gamma, &config.model, config.d, len_tilde, rho1)?.solve()
}

pub fn solve_i1_ssa(target: &TargetSpec, config: &IntegratedConfig) -> Result<IntegratedSolution> {
    solve_integrated(target, &IntegratedConfig { d: 1, ..config.clone() })
}

pub fn solve_i2_ssa(target: &TargetSpec, config: &IntegratedConfig) -> Result<IntegratedSolution> {
    solve_integrated(target, &IntegratedConfig { d: 2, ..config.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn summation_and_difference() {
        let (s, d) = sigma_delta_matrices(3).unwrap();
        let v = &s * DVector::from_element(3, 1.0);
        assert_eq!(v.as_slice(), &[1.0, 2.0, 3.0]);
        let (s, d10) = sigma_delta_matrices(10).unwrap();
        assert_eq!(&d10 * &s, DMatrix::identity(10, 10));
        assert_eq!(d.nrows(), 3);
        // last two columns of Σ² count down from the corner
        let s2 = &s * &s;
        for k in 0..10 {
            assert_eq!(s2[(k, 9)], if k == 9 { 1.0 } else { 0.0 });
            assert_eq!(s2[(k, 8)], if k >= 8 { (k - 7) as f64 } else { 0.0 });
        }
    }

    #[test]
    fn constraint_basis() {
        let b = b_matrix(3, 1).unwrap();
        assert_eq!(b.column(0).as_slice(), &[-1.0, 1.0, 0.0]);
        assert_eq!(b.clone().rank(1e-12), 2);
        let b2 = b_matrix(4, 2).unwrap();
        for j in 0..2 {
            let col = b2.column(j);
            assert_eq!(col.sum(), 0.0);
            assert_eq!(col.iter().enumerate().map(|(k, x)| k as f64 * x).sum::<f64>(), 0.0);
        }
        assert!(b_matrix(2, 2).is_err());
        assert!(b_matrix(5, 3).is_err());
    }

    #[test]
    fn zero_multiplier_is_benchmark() {
        let gamma: Vec<f64> = (0..12).map(|k| 0.8f64.powi(k) * 0.2).collect();
        for d in [1, 2] {
            let sys = IntegratedSystem::new(gamma.clone(), &ProcessModel::ar1(0.3).unwrap(), d, 24, 0.9)
                .unwrap();
            let bx = sys.b_x(0.0).unwrap();
            for (a, b) in bx.iter().zip(&gamma) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-9);
            }
            assert!(sys.mse(&bx) < 1e-18);
            let bx = sys.b_x(-3.7).unwrap();
            let (l, s) = level_and_slope(&bx);
            assert_abs_diff_eq!(l, sys.gamma0, epsilon = 1e-12);
            if d == 2 {
                assert_abs_diff_eq!(s, sys.gamma0_dot, epsilon = 1e-12);
            }
        }
    }
}
