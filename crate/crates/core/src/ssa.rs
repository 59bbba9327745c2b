//! White-noise SSA solver.
//!
//! For a causal filter `b` of length `L` and an MSE predictor `γ_δ`, the
//! solver maximizes `b'γ_δ` subject to `b'b = l` and `b'Mb = l·ρ_1`.
//! Stationary points have the form
//!
//! ```text
//! b(ν) = D Σ_i w_i / (2λ_i − ν) · v_i      (w = V'γ_δ)
//! ```
//!
//! and their lag-one autocorrelation `ρ(ν)` is strictly monotone on each
//! side of the spectral poles, so `ν` is found by bracketing and bisection.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SsaError};
use crate::linalg::{dot, norm_sq};
use crate::spectral::{
    acf1, eigenpairs, lag_one_product, spectral_weights, SpectralBasis, SpectralWeights,
    DEFAULT_TOL_NZ,
};
use crate::targets::TargetSpec;

/// Distance to a pole `2λ_i` below which `b(ν)` is reported as singular.
pub const POLE_TOL: f64 = 1e-9;
/// `|ρ_1 − ρ_MSE|` below which the problem is treated as unconstrained.
pub const DEGENERATE_TOL: f64 = 1e-9;
/// Target accuracy of the root finder on `|ρ(ν) − ρ_1|`.
pub const ROOT_TOL: f64 = 1e-12;
/// Initial step of the bracket expansion away from `|ν| = 2`.
pub const BRACKET_EPS: f64 = 1e-6;

/// Holding-time constraint, either as lag-one autocorrelation or as mean duration between sign changes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    Rho(f64),
    HoldingTime(f64),
}

impl Constraint {
    pub fn rho1(&self) -> Result<f64> {
        match *self {
            Constraint::Rho(r) => {
                if !(r > -1.0 && r < 1.0) {
                    return Err(SsaError::domain(r, "rho1 must lie in (-1, 1)"));
                }
                Ok(r)
            }
            Constraint::HoldingTime(ht) => rho_from_ht(ht),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Pick the branch from the sign of `ρ_1 − ρ_MSE`.
    #[default]
    Auto,
    /// `ν ≥ 2`: smoother than the MSE predictor.
    Smooth,
    /// `ν ≤ −2`: rougher than the MSE predictor.
    Unsmooth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsaConfig {
    pub constraint: Constraint,
    /// Length constraint `b'b = l`.
    pub scale: f64,
    pub branch: Branch,
    /// Relative threshold defining the spectral support.
    pub tol_nz: f64,
}

impl SsaConfig {
    pub fn rho(rho1: f64) -> Self {
        Self::new(Constraint::Rho(rho1))
    }

    pub fn holding_time(ht1: f64) -> Self {
        Self::new(Constraint::HoldingTime(ht1))
    }

    pub fn new(constraint: Constraint) -> Self {
        Self {
            constraint,
            scale: 1.0,
            branch: Branch::Auto,
            tol_nz: DEFAULT_TOL_NZ,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    fn checked_scale(&self) -> Result<f64> {
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(SsaError::domain(self.scale, "scale must be positive"));
        }
        Ok(self.scale)
    }
}

/// MSE predictor `γ_δ` plus the output variance of the target it approximates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsaProblem {
    pub gamma_delta: Vec<f64>,
    /// Variance of the target `z_{t+δ}` in units of the noise variance.
    pub target_energy: f64,
}

impl SsaProblem {
    pub fn new(gamma_delta: Vec<f64>, target_energy: f64) -> Result<Self> {
        if !(target_energy > 0.0) || !target_energy.is_finite() {
            return Err(SsaError::domain(target_energy, "target variance must be positive"));
        }
        Ok(Self {
            gamma_delta,
            target_energy,
        })
    }

    /// Treats `γ_δ` itself as the target, so correlations are measured against the MSE predictor.
    pub fn from_predictor(gamma_delta: Vec<f64>) -> Result<Self> {
        let e = norm_sq(&gamma_delta);
        Self::new(gamma_delta, e)
    }

    pub fn from_target(spec: &TargetSpec) -> Result<Self> {
        Self::new(spec.mse_nowcast()?, spec.filter.energy())
    }

    pub fn len(&self) -> usize {
        self.gamma_delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma_delta.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolutionKind {
    /// Regular root `ρ(ν) = ρ_1`.
    Interior {
        /// The root lies in `(2λ_1, 2)` or `(−2, 2λ_L)` rather than on `|ν| ≥ 2`.
        extended: bool,
    },
    /// `ρ_1 = ±ρ_max(L)`: a single extreme eigenvector.
    Boundary,
    /// Incomplete spectral support filled in at eigenvector `i0` (zero-based) with amplitude `n_tilde`.
    Completed { i0: usize, n_tilde: f64 },
    /// `ρ_1 = ρ_MSE`: the rescaled MSE predictor.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `b'γ_δ`.
    pub criterion_value: f64,
    pub target_correlation: f64,
    pub acf1: f64,
    pub holding_time: f64,
    pub sign_accuracy: f64,
    /// `E[(z_{t+δ} − y_t)²]` under unit-variance white noise.
    pub mse_vs_target: f64,
}

impl Diagnostics {
    pub fn evaluate(b: &[f64], problem: &SsaProblem) -> Self {
        let crit = dot(b, &problem.gamma_delta);
        let bb = norm_sq(b);
        let tc = (crit / (bb * problem.target_energy).sqrt()).clamp(-1.0, 1.0);
        let rho = acf1(b);
        Self {
            criterion_value: crit,
            target_correlation: tc,
            acf1: rho,
            holding_time: PI / rho.clamp(-1.0, 1.0).acos(),
            sign_accuracy: 0.5 + tc.asin() / PI,
            mse_vs_target: problem.target_energy - 2.0 * crit + bb,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsaSolution {
    /// Coefficient `k` multiplies `x_{t−k}`.
    pub b: Vec<f64>,
    /// `None` for boundary and degenerate solutions (formally `|ν| = ∞` for the latter).
    pub nu: Option<f64>,
    pub d_sign: f64,
    pub rho1: f64,
    pub scale: f64,
    pub kind: SolutionKind,
    /// Multipliers `(λ̃_1, λ̃_2)` of `γ_δ = 2λ̃_1 b + 2λ̃_2 Mb`, where defined.
    pub multipliers: Option<(f64, f64)>,
    pub iterations: usize,
    /// `|ρ(b) − ρ_1|` at the returned solution.
    pub residual: f64,
    pub diagnostics: Diagnostics,
}

impl SsaSolution {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }

    /// Writes `lag,weight` rows with a header.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> std::io::Result<()> {
        crate::io::write_lag_weight_csv(out, (0i64..).zip(self.b.iter().copied()))
    }
}

/// `ht = π / arccos ρ`.
pub fn ht_from_rho(rho: f64) -> Result<f64> {
    if !(rho > -1.0 && rho < 1.0) {
        return Err(SsaError::domain(rho, "lag-one correlation must lie in (-1, 1)"));
    }
    Ok(PI / rho.acos())
}

/// `ρ = cos(π / ht)`.
pub fn rho_from_ht(ht: f64) -> Result<f64> {
    if !(ht > 1.0) || !ht.is_finite() {
        return Err(SsaError::domain(ht, "holding time must exceed 1"));
    }
    Ok((PI / ht).cos())
}

/// `0.5 + arcsin(ρ)/π`, the probability that predictor and target share the same sign.
pub fn sign_accuracy(target_correlation: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&target_correlation) {
        return Err(SsaError::domain(
            target_correlation,
            "correlation must lie in [-1, 1]",
        ));
    }
    Ok(0.5 + target_correlation.asin() / PI)
}

/// Transfer function `1 / (2cos ω − ν)` of the AR(2) filter generating `b(ν)` from `γ_δ`.
///
/// Ordinates at an exact pole are `+∞`.
pub fn ssa_ar2_transfer(nu: f64, omegas: &[f64]) -> Vec<f64> {
    omegas
        .iter()
        .map(|&w| {
            let den = 2.0 * w.cos() - nu;
            if den.abs() <= f64::EPSILON {
                f64::INFINITY
            } else {
                1.0 / den
            }
        })
        .collect()
}

fn check_pole(sw: &SpectralWeights, basis: &SpectralBasis, nu: f64) -> Result<()> {
    for &i in &sw.nz_set {
        let pole = 2.0 * basis.eigenvalues()[i];
        if (nu - pole).abs() < POLE_TOL {
            return Err(SsaError::Singular(format!(
                "nu = {nu} is within {POLE_TOL:e} of the pole 2*lambda_{} = {pole}",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Unnormalized `Σ_{i∈NZ} w_i/(2λ_i − ν) v_i` without pole checks.
fn b_unchecked(sw: &SpectralWeights, basis: &SpectralBasis, nu: f64) -> Vec<f64> {
    let lam = basis.eigenvalues();
    let mut coef = vec![0.0; basis.len()];
    for &i in &sw.nz_set {
        coef[i] = sw.w[i] / (2.0 * lam[i] - nu);
    }
    basis.synthesize(&coef).expect("dimensions agree")
}

/// `(Σλw²/(2λ−ν)², Σw²/(2λ−ν)²)` over the support.
fn moments(sw: &SpectralWeights, basis: &SpectralBasis, nu: f64) -> (f64, f64) {
    let lam = basis.eigenvalues();
    sw.nz_set.iter().fold((0.0, 0.0), |(m1, m2), &i| {
        let q = sw.w[i] / (2.0 * lam[i] - nu);
        let q2 = q * q;
        (m1 + lam[i] * q2, m2 + q2)
    })
}

fn rho_unchecked(sw: &SpectralWeights, basis: &SpectralBasis, nu: f64) -> f64 {
    let (m1, m2) = moments(sw, basis, nu);
    m1 / m2
}

/// `b(ν)` with `D = 1`, i.e. `(2M − νI)⁻¹ γ_δ` expressed in the eigenbasis.
pub fn b_of_nu(gamma_delta: &[f64], nu: f64, basis: &SpectralBasis) -> Result<Vec<f64>> {
    let sw = spectral_weights(gamma_delta, basis, DEFAULT_TOL_NZ)?;
    check_pole(&sw, basis, nu)?;
    Ok(b_unchecked(&sw, basis, nu))
}

/// Lag-one autocorrelation of `b(ν)`.
pub fn rho_of_nu(sw: &SpectralWeights, basis: &SpectralBasis, nu: f64) -> Result<f64> {
    if sw.nz_set.is_empty() {
        return Err(SsaError::Identifiability("empty spectral support".into()));
    }
    check_pole(sw, basis, nu)?;
    Ok(rho_unchecked(sw, basis, nu))
}

/// Largest residual of `b_{k−1} − ν b_k + b_{k+1} = c·γ_k` with `b_{−1} = b_L = 0`.
pub fn difference_equation_residual(b: &[f64], gamma_delta: &[f64], nu: f64, c: f64) -> f64 {
    let n = b.len();
    (0..n)
        .map(|k| {
            let prev = if k > 0 { b[k - 1] } else { 0.0 };
            let next = if k + 1 < n { b[k + 1] } else { 0.0 };
            (prev - nu * b[k] + next - c * gamma_delta[k]).abs()
        })
        .fold(0.0, f64::max)
}

struct Prepared {
    basis: SpectralBasis,
    sw: SpectralWeights,
    rho1: f64,
    scale: f64,
}

fn prepare(problem: &SsaProblem, config: &SsaConfig) -> Result<Prepared> {
    let len = problem.len();
    if len < 3 {
        return Err(SsaError::InvalidDimension(format!(
            "filter length must be at least 3, got {len}"
        )));
    }
    let scale = config.checked_scale()?;
    let rho1 = config.constraint.rho1()?;
    let basis = eigenpairs(len)?;
    let sw = spectral_weights(&problem.gamma_delta, &basis, config.tol_nz)?;
    let rho_max = basis.rho_max();
    if rho1.abs() > rho_max + 1e-12 {
        return Err(SsaError::Infeasible(format!(
            "|rho1| = {} exceeds rho_max({len}) = {rho_max}",
            rho1.abs()
        )));
    }
    Ok(Prepared {
        basis,
        sw,
        rho1,
        scale,
    })
}

/// Scales `raw` to `b'b = l` with the sign making `b'γ_δ` positive.
fn finish(
    raw: &[f64],
    problem: &SsaProblem,
    p: &Prepared,
    nu: Option<f64>,
    kind: SolutionKind,
    iterations: usize,
) -> SsaSolution {
    let crit = dot(raw, &problem.gamma_delta);
    let d_sign = if crit < 0.0 { -1.0 } else { 1.0 };
    let c = d_sign * (p.scale / norm_sq(raw)).sqrt();
    let b: Vec<f64> = raw.iter().map(|x| c * x).collect();
    let multipliers = nu.map(|nu| (-nu / (2.0 * c), 1.0 / c));
    let diagnostics = Diagnostics::evaluate(&b, problem);
    SsaSolution {
        residual: (diagnostics.acf1 - p.rho1).abs(),
        b,
        nu,
        d_sign,
        rho1: p.rho1,
        scale: p.scale,
        kind,
        multipliers,
        iterations,
        diagnostics,
    }
}

fn degenerate(problem: &SsaProblem, p: &Prepared) -> SsaSolution {
    finish(&problem.gamma_delta, problem, p, None, SolutionKind::Degenerate, 0)
}

/// Finds `ν` with `ρ(ν) = ρ_1` on one side of the spectrum.
///
/// In the variable `t = sgn·ν`, with `sgn = +1` on the smooth side, the
/// function `φ(t) = sgn·(ρ(sgn·t) − ρ_1)` decreases from its value at the
/// outermost eigenvalue `2λ_1` (or `2λ_L`) towards a negative limit as
/// `t → ∞`. The search starts at `t = 2`; when `φ(2) < 0` it continues
/// between that eigenvalue and 2.
fn find_nu(sw: &SpectralWeights, basis: &SpectralBasis, rho1: f64, sgn: f64) -> Result<(f64, bool, usize)> {
    let lam = basis.eigenvalues();
    // The search never passes the extreme eigenvalue, even when its weight
    // vanishes: beyond it spectral completion dominates.
    let edge = if sgn > 0.0 { 0 } else { basis.len() - 1 };
    let t_pole = sgn * 2.0 * lam[edge];
    let phi = |t: f64| sgn * (rho_unchecked(sw, basis, sgn * t) - rho1);

    let mut iterations = 0;
    let (mut lo, mut hi, extended);
    if phi(2.0) >= 0.0 {
        extended = false;
        lo = 2.0;
        hi = 2.0 + BRACKET_EPS;
        while phi(hi) >= 0.0 {
            iterations += 1;
            lo = hi;
            hi = 2.0 + 2.0 * (hi - 2.0);
            if hi > 1e15 {
                return Err(SsaError::Numerical(format!(
                    "no bracket for rho1 = {rho1} on the {} branch",
                    if sgn > 0.0 { "smooth" } else { "unsmooth" }
                )));
            }
        }
    } else {
        extended = true;
        hi = 2.0;
        let mut gap = 2.0 - t_pole;
        loop {
            iterations += 1;
            gap *= 0.5;
            lo = t_pole + gap;
            if phi(lo) > 0.0 {
                break;
            }
            hi = lo;
            if gap < 1e-13 * t_pole.abs().max(1.0) {
                return Err(SsaError::Infeasible(format!(
                    "rho1 = {rho1} is not attainable without spectral completion; \
                     the attainable limit is {}",
                    rho_unchecked(sw, basis, sgn * t_pole)
                )));
            }
        }
    }
    // bisection on [lo, hi] with φ(lo) > 0 > φ(hi)
    for _ in 0..400 {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let f = phi(mid);
        if f.abs() <= ROOT_TOL || hi - lo <= 4.0 * f64::EPSILON * mid.abs() {
            return Ok((sgn * mid, extended, iterations));
        }
        if f > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((sgn * 0.5 * (lo + hi), extended, iterations))
}

/// Optimal filter for the holding-time constraint in `config`.
///
/// Targets with incomplete spectral support whose constraint lies outside
/// the range reachable by `b(ν)` yield [`SsaError::Infeasible`]; use
/// [`solve_completed`] or [`solve`] for those.
pub fn solve_ssa(problem: &SsaProblem, config: &SsaConfig) -> Result<SsaSolution> {
    let p = prepare(problem, config)?;
    solve_prepared(problem, config, &p)
}

fn solve_prepared(problem: &SsaProblem, config: &SsaConfig, p: &Prepared) -> Result<SsaSolution> {
    let rho_max = p.basis.rho_max();
    if p.rho1.abs() >= rho_max - 1e-12 {
        let sign = if p.rho1 > 0.0 { 1 } else { -1 };
        return boundary_prepared(problem, sign, p);
    }
    let rho_mse = p.sw.rho_mse(&p.basis);
    let diff = p.rho1 - rho_mse;
    if diff.abs() <= DEGENERATE_TOL {
        return Ok(degenerate(problem, p));
    }
    let sgn = if diff > 0.0 { 1.0 } else { -1.0 };
    match (config.branch, sgn > 0.0) {
        (Branch::Smooth, false) => {
            return Err(SsaError::Infeasible(format!(
                "rho1 = {} is below rho_MSE = {rho_mse}; the smooth branch cannot reach it",
                p.rho1
            )))
        }
        (Branch::Unsmooth, true) => {
            return Err(SsaError::Infeasible(format!(
                "rho1 = {} is above rho_MSE = {rho_mse}; the unsmooth branch cannot reach it",
                p.rho1
            )))
        }
        _ => {}
    }
    let (nu, extended, iterations) = find_nu(&p.sw, &p.basis, p.rho1, sgn)?;
    if extended {
        log::warn!("root nu = {nu} lies inside (-2, 2); the constraint is close to the attainable limit");
    }
    let raw = b_unchecked(&p.sw, &p.basis, nu);
    Ok(finish(
        &raw,
        problem,
        p,
        Some(nu),
        SolutionKind::Interior { extended },
        iterations,
    ))
}

/// `±√l·v_1` (`sign = 1`) or `±√l·v_L` (`sign = −1`) with the sign of the matching weight.
pub fn boundary_solution(problem: &SsaProblem, sign: i32, scale: f64) -> Result<SsaSolution> {
    let rho_max = crate::spectral::rho_max(problem.len());
    let rho1 = if sign >= 0 { rho_max } else { -rho_max };
    let config = SsaConfig::rho(rho1).with_scale(scale);
    let p = prepare(problem, &config)?;
    boundary_prepared(problem, sign, &p)
}

fn boundary_prepared(problem: &SsaProblem, sign: i32, p: &Prepared) -> Result<SsaSolution> {
    let idx = if sign >= 0 { 0 } else { p.basis.len() - 1 };
    if !p.sw.contains(idx) {
        return Err(SsaError::NoSolution(format!(
            "spectral weight w_{} vanishes, so no filter with this extreme holding time correlates with the target",
            idx + 1
        )));
    }
    let v = p.basis.eigenvector(idx);
    Ok(finish(&v, problem, p, None, SolutionKind::Boundary, 0))
}

/// Optimum over `b(ν)` and all spectral completions at eigenvectors outside the support.
///
/// For complete support this is [`solve_ssa`]. Otherwise every `i0 ∉ NZ` with
/// `Ñ² = (ρ_1 M_2 − M_1)/(λ_{i0} − ρ_1) ≥ 0` at `ν = 2λ_{i0}` yields a
/// candidate `b(ν) + Ñ v_{i0}`; the uncompleted solution competes when it exists.
pub fn solve_completed(problem: &SsaProblem, config: &SsaConfig) -> Result<SsaSolution> {
    let p = prepare(problem, config)?;
    if p.sw.is_complete() {
        return solve_prepared(problem, config, &p);
    }
    let lam = p.basis.eigenvalues();
    let mut best: Option<SsaSolution> = match solve_prepared(problem, config, &p) {
        Ok(s) => Some(s),
        Err(SsaError::Infeasible(_)) | Err(SsaError::NoSolution(_)) => None,
        Err(e) => return Err(e),
    };
    for i0 in (0..p.basis.len()).filter(|&i| !p.sw.contains(i)) {
        let nu = 2.0 * lam[i0];
        let (m1, m2) = moments(&p.sw, &p.basis, nu);
        let den = lam[i0] - p.rho1;
        if den.abs() < 1e-14 {
            continue;
        }
        let n2 = (p.rho1 * m2 - m1) / den;
        if !(n2 >= 0.0) {
            continue;
        }
        let n_tilde = n2.sqrt();
        let mut raw = b_unchecked(&p.sw, &p.basis, nu);
        let v = p.basis.eigenvector(i0);
        raw.iter_mut().zip(&v).for_each(|(r, vi)| *r += n_tilde * vi);
        let cand = finish(
            &raw,
            problem,
            &p,
            Some(nu),
            SolutionKind::Completed { i0, n_tilde },
            0,
        );
        let better = match &best {
            None => true,
            Some(b) => cand.diagnostics.criterion_value > b.diagnostics.criterion_value + 1e-12,
        };
        if better {
            best = Some(cand);
        }
    }
    best.ok_or_else(|| {
        SsaError::Infeasible(format!(
            "no spectral completion attains rho1 = {}",
            p.rho1
        ))
    })
}

/// [`solve_ssa`], falling back to [`solve_completed`] when the support is incomplete.
pub fn solve(problem: &SsaProblem, config: &SsaConfig) -> Result<SsaSolution> {
    match solve_ssa(problem, config) {
        Err(SsaError::Infeasible(_)) | Err(SsaError::NoSolution(_)) => {
            solve_completed(problem, config)
        }
        other => other,
    }
}

/// Holding-time constrained filter rescaled for minimal mean-square error.
///
/// Same direction as [`solve_ssa`]; the length is chosen by least squares,
/// `b ← (b'γ_δ / b'b)·b`.
pub fn solve_ssa_mse(problem: &SsaProblem, config: &SsaConfig) -> Result<SsaSolution> {
    let mut sol = solve(problem, config)?;
    if sol.kind == SolutionKind::Degenerate {
        sol.b = problem.gamma_delta.clone();
    } else {
        let s = sol.diagnostics.criterion_value / norm_sq(&sol.b);
        sol.b.iter_mut().for_each(|x| *x *= s);
        if let Some((l1, l2)) = sol.multipliers.as_mut().map(|m| (m.0 / s, m.1 / s)) {
            sol.multipliers = Some((l1, l2));
        }
    }
    sol.scale = norm_sq(&sol.b);
    sol.diagnostics = Diagnostics::evaluate(&sol.b, problem);
    Ok(sol)
}

/// Outcome of [`verify_dual`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DualReport {
    pub trials: usize,
    pub violations: usize,
    pub skipped: usize,
    /// Largest `ρ(x) − ρ_1` (smooth) or `ρ_1 − ρ(x)` (unsmooth) seen; negative when never exceeded.
    pub max_excess: f64,
}

/// Checks that no filter with the same length and target correlation has a more extreme lag-one correlation.
///
/// On the smooth branch the solution should maximize `ρ(x)` over
/// `{x'x = l, x'γ_δ = b'γ_δ}`; on the unsmooth branch it should minimize it.
pub fn verify_dual(solution: &SsaSolution, gamma_delta: &[f64], trials: usize, seed: u64) -> DualReport {
    let mut report = DualReport {
        max_excess: f64::NEG_INFINITY,
        ..Default::default()
    };
    if trials == 0 {
        return report;
    }
    let direction = match solution.nu {
        Some(nu) if nu < 0.0 => -1.0,
        _ => 1.0,
    };
    let n = solution.b.len();
    let l = norm_sq(&solution.b);
    let gnorm = norm_sq(gamma_delta).sqrt();
    let u: Vec<f64> = gamma_delta.iter().map(|g| g / gnorm).collect();
    let a = dot(&solution.b, &u);
    let radial = (l - a * a).max(0.0).sqrt();
    let rho_ref = lag_one_product(&solution.b) / l;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < trials {
        let mag = 10f64.powf(-4.0 + 4.0 * rng.random::<f64>()) * l.sqrt();
        let mut x: Vec<f64> = solution
            .b
            .iter()
            .map(|bi| {
                let z: f64 = StandardNormal.sample(&mut rng);
                bi + mag * z
            })
            .collect();
        let along = dot(&x, &u);
        x.iter_mut().zip(&u).for_each(|(xi, ui)| *xi -= along * ui);
        let pn = norm_sq(&x).sqrt();
        if pn < 1e-12 * l.sqrt() {
            report.skipped += 1;
            continue;
        }
        for i in 0..n {
            x[i] = a * u[i] + radial * x[i] / pn;
        }
        let excess = direction * (lag_one_product(&x) / l - rho_ref);
        report.max_excess = report.max_excess.max(excess);
        if excess > 1e-8 {
            report.violations += 1;
        }
        done += 1;
    }
    report.trials = done;
    report
}
