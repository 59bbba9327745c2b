//! SSA for dependent stationary data driven by an ARMA process.
//!
//! A filter `b_x` applied to `x_t = ξ(B)ε_t` acts on the innovations through
//! `b_ε = Ξ b_x`, the convolution with the Wold weights. The criterion is
//! solved for `b_ε` as a white-noise problem and mapped back by deconvolution.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SsaError};
use crate::series;
use crate::ssa::{solve, Diagnostics, SsaConfig, SsaProblem, SsaSolution};
use crate::targets::{wn_mse_nowcast, TargetFilter, TargetSpec};

/// Largest number of Wold weights used when summing infinite tails.
const MAX_TAIL_TERMS: usize = 200_000;

#[derive(Debug, Deserialize)]
struct RawModel {
    #[serde(default)]
    ar: Vec<f64>,
    #[serde(default)]
    ma: Vec<f64>,
    #[serde(default = "unit_sigma")]
    sigma: f64,
}

fn unit_sigma() -> f64 {
    1.0
}

/// `x_t = Σ a_i x_{t−i} + ε_t + Σ m_j ε_{t−j}` with `Var(ε_t) = σ²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct ProcessModel {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub sigma: f64,
}

impl TryFrom<RawModel> for ProcessModel {
    type Error = SsaError;

    fn try_from(raw: RawModel) -> Result<Self> {
        ProcessModel::new(raw.ar, raw.ma)?.with_sigma(raw.sigma)
    }
}

impl Default for ProcessModel {
    fn default() -> Self {
        Self::white_noise()
    }
}

/// Largest modulus among the inverse roots of `1 − Σ c_i z^i`.
fn max_inverse_root(c: &[f64]) -> f64 {
    let p = c.len();
    if p == 0 {
        return 0.0;
    }
    if p == 1 {
        return c[0].abs();
    }
    let companion = DMatrix::from_fn(p, p, |i, j| {
        if i == 0 {
            c[j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn trim_trailing_zeros(mut v: Vec<f64>) -> Vec<f64> {
    while v.last() == Some(&0.0) {
        v.pop();
    }
    v
}

impl ProcessModel {
    pub fn white_noise() -> Self {
        Self {
            ar: Vec::new(),
            ma: Vec::new(),
            sigma: 1.0,
        }
    }

    pub fn ar1(a: f64) -> Result<Self> {
        Self::new(vec![a], Vec::new())
    }

    /// Validated ARMA model; rejects non-stationary AR and non-invertible MA parts.
    pub fn new(ar: Vec<f64>, ma: Vec<f64>) -> Result<Self> {
        if ar.iter().chain(&ma).any(|x| !x.is_finite()) {
            return Err(SsaError::Model("coefficients must be finite".into()));
        }
        let ar = trim_trailing_zeros(ar);
        let ma = trim_trailing_zeros(ma);
        let r = max_inverse_root(&ar);
        if r >= 1.0 - 1e-12 {
            return Err(SsaError::Model(format!(
                "AR polynomial has a root on or inside the unit circle (inverse root modulus {r})"
            )));
        }
        let neg_ma: Vec<f64> = ma.iter().map(|m| -m).collect();
        let r = max_inverse_root(&neg_ma);
        if r >= 1.0 - 1e-12 {
            return Err(SsaError::Model(format!(
                "MA polynomial has a root on or inside the unit circle (inverse root modulus {r})"
            )));
        }
        Ok(Self {
            ar,
            ma,
            sigma: 1.0,
        })
    }

    pub fn with_sigma(mut self, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(SsaError::Model(format!("sigma must be positive, got {sigma}")));
        }
        self.sigma = sigma;
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| SsaError::Model(e.to_string()))
    }

    pub fn is_white_noise(&self) -> bool {
        self.ar.is_empty() && self.ma.is_empty()
    }

    /// Coefficients of `ξ(B)⁻¹ = a(B)/m(B)`, first `n` terms.
    pub fn inverse_weights(&self, n: usize) -> Vec<f64> {
        let mut a = vec![1.0];
        a.extend(self.ar.iter().map(|x| -x));
        let mut m = vec![1.0];
        m.extend(self.ma.iter().copied());
        series::mul(&a, &series::reciprocal(&m, n), n)
    }
}

/// Wold weights `ξ_0 = 1, ξ_1, …, ξ_{n−1}` of `model`.
pub fn wold_weights(model: &ProcessModel, n: usize) -> Vec<f64> {
    let mut xi = vec![0.0; n];
    for k in 0..n {
        let mut v = if k == 0 {
            1.0
        } else {
            model.ma.get(k - 1).copied().unwrap_or(0.0)
        };
        for (i, a) in model.ar.iter().enumerate() {
            if k > i {
                v += a * xi[k - i - 1];
            }
        }
        xi[k] = v;
    }
    xi
}

/// Wold weights until their tail is negligible, for summing infinite convolutions.
fn wold_until_decay(model: &ProcessModel) -> Vec<f64> {
    if model.is_white_noise() {
        return vec![1.0];
    }
    let mut n = 256;
    loop {
        let xi = wold_weights(model, n);
        let peak = xi.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let tail = xi[n - n / 8..].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if tail <= 1e-14 * peak || n >= MAX_TAIL_TERMS {
            return xi;
        }
        n *= 2;
    }
}

/// Convolution with Wold weights as an `rows × cols` lower-banded Toeplitz matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct WoldMatrix {
    pub xi: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
}

impl WoldMatrix {
    pub fn new(model: &ProcessModel, rows: usize, cols: usize) -> Self {
        Self {
            xi: wold_weights(model, rows),
            rows,
            cols,
        }
    }

    pub fn from_weights(xi: Vec<f64>, rows: usize, cols: usize) -> Self {
        let mut xi = xi;
        xi.resize(rows, 0.0);
        Self { xi, rows, cols }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| {
            if i >= j {
                self.xi[i - j]
            } else {
                0.0
            }
        })
    }

    /// `Ξ b` for `b` of length `cols`.
    pub fn apply(&self, b: &[f64]) -> Vec<f64> {
        series::mul(&self.xi, &b[..b.len().min(self.cols)], self.rows)
    }
}

/// Recovers `b_x` from `(ξ·b_x)_0, …, (ξ·b_x)_{L−1}` by forward substitution.
pub fn deconvolve(conv: &[f64], xi: &[f64], len: usize) -> Vec<f64> {
    let mut b = vec![0.0; len];
    for k in 0..len {
        let mut v = conv.get(k).copied().unwrap_or(0.0);
        for j in 0..k {
            v -= xi.get(k - j).copied().unwrap_or(0.0) * b[j];
        }
        b[k] = v / xi[0];
    }
    b
}

/// Causal projection of `Σ γ_k x_{t+δ−k}` onto the past of `x`, given Wold weights and their inverse.
///
/// `xi` must hold at least `len + (δ − min_lag)` terms and `xi_inv` at least `len`.
fn mse_predictor_series(
    filter: &TargetFilter,
    delta: i64,
    len: usize,
    xi: &[f64],
    xi_inv: &[f64],
) -> Vec<f64> {
    let mut out: Vec<f64> = (0..len as i64).map(|k| filter.gamma(k + delta)).collect();
    let lead = (delta - filter.min_lag).max(0) as usize;
    if lead == 0 {
        return out;
    }
    // S(B) = Σ_m γ_{δ−m} Σ_j ξ_{j+m} B^j collects the forecasts of future innovations
    let mut s = vec![0.0; len];
    for m in 1..=lead {
        let g = filter.gamma(delta - m as i64);
        if g == 0.0 {
            continue;
        }
        for (j, sj) in s.iter_mut().enumerate() {
            *sj += g * xi.get(j + m).copied().unwrap_or(0.0);
        }
    }
    for (o, v) in out.iter_mut().zip(series::mul(&s, xi_inv, len)) {
        *o += v;
    }
    out
}

fn lead_of(filter: &TargetFilter, delta: i64) -> usize {
    (delta - filter.min_lag).max(0) as usize
}

/// MSE predictor of the target for data following `model`, first `L` coefficients.
///
/// The computation is exact: only finitely many Wold weights enter for a target of finite span.
pub fn mse_predictor_dependent(target: &TargetSpec, model: &ProcessModel) -> Result<Vec<f64>> {
    wn_mse_nowcast(&target.filter, target.delta, target.len)?;
    Ok(mse_predictor_unchecked(target, model, 0))
}

fn mse_predictor_unchecked(target: &TargetSpec, model: &ProcessModel, d: usize) -> Vec<f64> {
    let len = target.len;
    let n = len + lead_of(&target.filter, target.delta) + 1;
    let xi = series::integrate(&wold_weights(model, n), d, n);
    let xi_inv = series::difference(&model.inverse_weights(len), d, len);
    mse_predictor_series(&target.filter, target.delta, len, &xi, &xi_inv)
}

/// MSE predictor for data whose `d`-th differences follow `model`.
pub fn mse_predictor_integrated(target: &TargetSpec, model: &ProcessModel, d: usize) -> Result<Vec<f64>> {
    wn_mse_nowcast(&target.filter, target.delta, target.len)?;
    Ok(mse_predictor_unchecked(target, model, d))
}

/// Variance of `z_t = Σ γ_k x_{t−k}` under `model` with unit innovation variance.
pub fn target_energy(filter: &TargetFilter, model: &ProcessModel) -> f64 {
    let xi = wold_until_decay(model);
    let n = filter.weights.len() + xi.len() - 1;
    series::mul(&filter.weights, &xi, n).iter().map(|g| g * g).sum()
}

/// Solution for dependent data in both representations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependentSolution {
    /// Filter applied to the observed series.
    pub b_x: Vec<f64>,
    /// The same filter acting on the innovations; `solution.b`.
    pub b_eps: Vec<f64>,
    /// MSE predictor for the observed series.
    pub mse_predictor: Vec<f64>,
    /// Innovation-space solve, whose diagnostics refer to `b_eps`.
    pub solution: SsaSolution,
    /// Innovation-space diagnostics of the MSE predictor.
    pub mse_diagnostics: Diagnostics,
    /// Innovation-space diagnostics of the white-noise nowcast applied to dependent data.
    pub classic_diagnostics: Diagnostics,
}

fn eps_problem(target: &TargetSpec, model: &ProcessModel, gamma_x: &[f64], rows: usize) -> Result<(SsaProblem, WoldMatrix)> {
    let xi = WoldMatrix::new(model, rows, gamma_x.len());
    let g_eps = xi.apply(gamma_x);
    let problem = SsaProblem::new(g_eps, target_energy(&target.filter, model))?;
    Ok((problem, xi))
}

/// Dependent-data SSA of length `L`: solve for `b_ε = Ξ b_x`, then deconvolve.
pub fn solve_ssa_dependent(
    target: &TargetSpec,
    model: &ProcessModel,
    config: &SsaConfig,
) -> Result<DependentSolution> {
    let gamma_x = mse_predictor_dependent(target, model)?;
    let (problem, xi) = eps_problem(target, model, &gamma_x, target.len)?;
    let solution = solve(&problem, config)?;
    let b_x = deconvolve(&solution.b, &xi.xi, target.len);
    let classic = xi.apply(&target.mse_nowcast()?);
    Ok(DependentSolution {
        b_x,
        b_eps: solution.b.clone(),
        mse_diagnostics: Diagnostics::evaluate(&problem.gamma_delta, &problem),
        classic_diagnostics: Diagnostics::evaluate(&classic, &problem),
        mse_predictor: gamma_x,
        solution,
    })
}

/// Extended criterion: solve in innovation space at length `L̃ ≥ L`, keep `L` coefficients of `b_x`.
///
/// Lags outside the target's stored span count as zero.
pub fn solve_ssa_extended(
    target: &TargetSpec,
    model: &ProcessModel,
    config: &SsaConfig,
    len_tilde: usize,
) -> Result<DependentSolution> {
    if len_tilde < target.len {
        return Err(SsaError::InvalidDimension(format!(
            "extended length {len_tilde} is shorter than L = {}",
            target.len
        )));
    }
    let ext = TargetSpec::new(target.filter.clone(), target.delta, len_tilde);
    let gamma_ext = mse_predictor_unchecked(&ext, model, 0);
    let (problem, xi) = eps_problem(target, model, &gamma_ext, len_tilde)?;
    let solution = solve(&problem, config)?;
    let b_x = deconvolve(&solution.b[..target.len], &xi.xi, target.len);
    let nowcast: Vec<f64> = (0..len_tilde as i64)
        .map(|k| target.filter.gamma(k + target.delta))
        .collect();
    let classic = xi.apply(&nowcast);
    Ok(DependentSolution {
        b_x,
        b_eps: solution.b.clone(),
        mse_diagnostics: Diagnostics::evaluate(&problem.gamma_delta, &problem),
        classic_diagnostics: Diagnostics::evaluate(&classic, &problem),
        mse_predictor: gamma_ext[..target.len].to_vec(),
        solution,
    })
}
