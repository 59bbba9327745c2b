//! Benchmark target filters and their causal MSE counterparts.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SsaError};
use crate::linalg::{hp_band_entry, BandCholesky};

/// Two-sided filter `γ_k` over lags `min_lag ..= max_lag`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetFilter {
    pub label: String,
    pub min_lag: i64,
    pub weights: Vec<f64>,
}

impl TargetFilter {
    pub fn new(label: impl Into<String>, min_lag: i64, weights: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            min_lag,
            weights,
        }
    }

    /// Symmetric filter from its non-negative half `γ_0, γ_1, …`.
    pub fn symmetric(label: impl Into<String>, half: &[f64]) -> Self {
        let h = half.len() as i64 - 1;
        let weights = (-h..=h).map(|k| half[k.unsigned_abs() as usize]).collect();
        Self::new(label, -h, weights)
    }

    pub fn max_lag(&self) -> i64 {
        self.min_lag + self.weights.len() as i64 - 1
    }

    /// `γ_k`, zero outside the stored span.
    pub fn gamma(&self, k: i64) -> f64 {
        if k < self.min_lag || k > self.max_lag() {
            0.0
        } else {
            self.weights[(k - self.min_lag) as usize]
        }
    }

    pub fn lags(&self) -> impl Iterator<Item = i64> + '_ {
        self.min_lag..=self.max_lag()
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Output variance `Σ γ_k²` under standardized white noise.
    pub fn energy(&self) -> f64 {
        self.weights.iter().map(|g| g * g).sum()
    }

    /// Lag-one autocorrelation of the filter output under white noise.
    pub fn acf1(&self) -> f64 {
        crate::spectral::acf1(&self.weights)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.min_lag == -self.max_lag()
            && self
                .weights
                .iter()
                .zip(self.weights.iter().rev())
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// Writes `lag,weight` rows with a header.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> std::io::Result<()> {
        crate::io::write_lag_weight_csv(out, self.lags().zip(self.weights.iter().copied()))
    }
}

/// A target filter together with the forecast horizon `δ` and causal length `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub filter: TargetFilter,
    pub delta: i64,
    pub len: usize,
}

impl TargetSpec {
    pub fn new(filter: TargetFilter, delta: i64, len: usize) -> Self {
        Self { filter, delta, len }
    }

    /// `γ_δ` for this horizon and length, see [`wn_mse_nowcast`].
    pub fn mse_nowcast(&self) -> Result<Vec<f64>> {
        wn_mse_nowcast(&self.filter, self.delta, self.len)
    }
}

fn hp_center_row(lambda: f64, half_span: usize) -> Result<Vec<f64>> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(SsaError::domain(lambda, "HP smoothing parameter must be positive"));
    }
    if half_span == 0 {
        return Err(SsaError::InvalidDimension("half_span must be positive".into()));
    }
    let n = 2 * half_span + 1;
    let chol = BandCholesky::factor(n, 2, hp_band_entry(n, lambda))?;
    let mut e = vec![0.0; n];
    e[half_span] = 1.0;
    // The smoother is symmetric, so the centre column is the centre row.
    let solved = chol.solve(&e);
    // remove rounding asymmetry so that γ_k == γ_{-k} exactly
    let mut row: Vec<f64> = solved
        .iter()
        .zip(solved.iter().rev())
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    let s: f64 = row.iter().sum();
    row.iter_mut().for_each(|x| *x /= s);
    Ok(row)
}

/// Bi-infinite Hodrick-Prescott trend filter, truncated to `|k| ≤ half_span`.
///
/// Fails with [`SsaError::SpanTooSmall`] if `|γ_{half_span}| ≥ 1e-12`.
pub fn hp_two_sided(lambda: f64, half_span: usize) -> Result<TargetFilter> {
    let row = hp_center_row(lambda, half_span)?;
    let tail = row[0].abs();
    if tail >= 1e-12 {
        return Err(SsaError::SpanTooSmall(format!(
            "|gamma_{half_span}| = {tail:e} for lambda = {lambda}; widen the span"
        )));
    }
    Ok(TargetFilter::new(format!("HP({lambda})"), -(half_span as i64), row))
}

/// Centre row of the finite-sample HP smoother on `2·half_span + 1` points.
///
/// Unlike [`hp_two_sided`] no tail check is applied: this is the symmetric
/// filter a finite HP smoother actually applies mid-sample.
pub fn hp_finite_window(lambda: f64, half_span: usize) -> Result<TargetFilter> {
    let row = hp_center_row(lambda, half_span)?;
    Ok(TargetFilter::new(
        format!("HP({lambda}, window {})", 2 * half_span + 1),
        -(half_span as i64),
        row,
    ))
}

/// Default `half_span` keeping the HP tail below 1e-12.
pub fn hp_default_half_span(lambda: f64) -> usize {
    if lambda <= 1600.0 {
        500
    } else if lambda <= 14400.0 {
        1500
    } else {
        // decay length grows like λ^{1/4}
        (1500.0 * (lambda / 14400.0).powf(0.25)).ceil() as usize
    }
}

/// Concurrent (end-point) HP filter of length `len`, weights on `x_t, …, x_{t-len+1}`.
pub fn hp_concurrent(lambda: f64, len: usize) -> Result<Vec<f64>> {
    if len < 3 {
        return Err(SsaError::InvalidDimension(
            "concurrent HP filter needs at least 3 coefficients".into(),
        ));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(SsaError::domain(lambda, "HP smoothing parameter must be positive"));
    }
    let chol = BandCholesky::factor(len, 2, hp_band_entry(len, lambda))?;
    let mut e = vec![0.0; len];
    e[len - 1] = 1.0;
    let mut row = chol.solve(&e);
    row.reverse();
    Ok(row)
}

/// Baxter-King band-pass filter for periodicities in `[period_low, period_high]`.
pub fn bk_two_sided(period_low: f64, period_high: f64, half_span: usize) -> Result<TargetFilter> {
    if !(period_low >= 2.0) {
        return Err(SsaError::domain(period_low, "lower period must be at least 2"));
    }
    if !(period_low < period_high) {
        return Err(SsaError::domain(
            period_high,
            "upper period must exceed the lower period",
        ));
    }
    if half_span == 0 {
        return Err(SsaError::InvalidDimension("half_span must be positive".into()));
    }
    let w_lo = 2.0 * PI / period_high;
    let w_hi = 2.0 * PI / period_low;
    let ideal = |j: usize| -> f64 {
        if j == 0 {
            (w_hi - w_lo) / PI
        } else {
            let j = j as f64;
            ((j * w_hi).sin() - (j * w_lo).sin()) / (PI * j)
        }
    };
    let half: Vec<f64> = (0..=half_span).map(ideal).collect();
    let total = half[0] + 2.0 * half[1..].iter().sum::<f64>();
    let theta = total / (2 * half_span + 1) as f64;
    let half: Vec<f64> = half.iter().map(|b| b - theta).collect();
    Ok(TargetFilter::symmetric(
        format!("BK({period_low},{period_high})"),
        &half,
    ))
}

/// White-noise MSE predictor `γ_δ = (γ_δ, …, γ_{δ+L-1})`.
pub fn wn_mse_nowcast(target: &TargetFilter, delta: i64, len: usize) -> Result<Vec<f64>> {
    if len == 0 {
        return Err(SsaError::InvalidDimension("filter length must be at least 1".into()));
    }
    let last = delta + len as i64 - 1;
    if delta < target.min_lag || last > target.max_lag() {
        return Err(SsaError::SpanTooSmall(format!(
            "target covers lags {}..={}, need {delta}..={last}",
            target.min_lag,
            target.max_lag()
        )));
    }
    Ok((delta..=last).map(|k| target.gamma(k)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};

    /// Dense penalized least-squares oracle.
    fn dense_hp_row(lambda: f64, n: usize, row: usize) -> Vec<f64> {
        let mut d = DMatrix::zeros(n - 2, n);
        for r in 0..n - 2 {
            d[(r, r)] = 1.0;
            d[(r, r + 1)] = -2.0;
            d[(r, r + 2)] = 1.0;
        }
        let a = DMatrix::identity(n, n) + lambda * d.transpose() * d;
        let mut e = DVector::zeros(n);
        e[row] = 1.0;
        a.lu().solve(&e).unwrap().iter().copied().collect()
    }

    #[test]
    fn hp1600_against_dense_oracle() {
        let hp = hp_two_sided(1600.0, 500).unwrap();
        let oracle = dense_hp_row(1600.0, 1001, 500);
        for (a, b) in hp.weights.iter().zip(&oracle) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        // frozen from the dense oracle above
        assert_abs_diff_eq!(hp.gamma(0), 0.056075569, epsilon = 1e-8);
        assert_abs_diff_eq!(hp.sum(), 1.0, epsilon = 1e-8);
        assert_eq!(hp.gamma(17), hp.gamma(-17));
        assert!(hp.is_symmetric(0.0));
    }

    #[test]
    fn hp_span_doubling_is_stable() {
        let a = hp_two_sided(1600.0, 500).unwrap();
        let b = hp_two_sided(1600.0, 1000).unwrap();
        assert!((a.gamma(0) - b.gamma(0)).abs() < 1e-10);
    }

    #[test]
    fn hp_tail_check() {
        let err = hp_two_sided(1600.0, 30).unwrap_err();
        assert_eq!(err.code(), "span-too-small");
        assert!(hp_finite_window(1600.0, 30).is_ok());
    }

    #[test]
    fn hp_identity_limit() {
        let hp = hp_two_sided(1e-8, 20).unwrap();
        assert_abs_diff_eq!(hp.gamma(0), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(hp.gamma(1), 0.0, epsilon = 1e-6);
        let c = hp_concurrent(1e-8, 10).unwrap();
        assert_abs_diff_eq!(c[0], 1.0, epsilon = 1e-6);
        assert!(c[1..].iter().all(|x| x.abs() < 1e-6));
    }

    #[test]
    fn hp_concurrent_against_dense_oracle() {
        let c = hp_concurrent(14400.0, 201).unwrap();
        let mut oracle = dense_hp_row(14400.0, 201, 200);
        oracle.reverse();
        for (a, b) in c.iter().zip(&oracle) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(c.iter().sum::<f64>(), 1.0, epsilon = 1e-10);
        assert!(hp_concurrent(1600.0, 2).is_err());
    }

    #[test]
    fn bk_closed_form() {
        let bk = bk_two_sided(6.0, 32.0, 12).unwrap();
        assert!(bk.is_symmetric(0.0));
        assert_abs_diff_eq!(bk.sum(), 0.0, epsilon = 1e-12);
        // oracle: direct sinc evaluation
        let (lo, hi) = (2.0 * PI / 32.0, 2.0 * PI / 6.0);
        let b: Vec<f64> = (0..=12)
            .map(|j| {
                if j == 0 {
                    (hi - lo) / PI
                } else {
                    let j = j as f64;
                    ((j * hi).sin() - (j * lo).sin()) / (PI * j)
                }
            })
            .collect();
        let mean = (b[0] + 2.0 * b[1..].iter().sum::<f64>()) / 25.0;
        assert_abs_diff_eq!(bk.gamma(0), (hi - lo) / PI - mean, epsilon = 1e-14);
        assert_abs_diff_eq!(bk.gamma(5), b[5] - mean, epsilon = 1e-14);
    }

    #[test]
    fn bk_rejects_degenerate_band() {
        assert!(bk_two_sided(8.0, 8.0, 12).is_err());
        assert!(bk_two_sided(1.5, 8.0, 12).is_err());
    }

    #[test]
    fn ma1_forecast() {
        let target = TargetFilter::new("MA(1)", 0, vec![1.0, 0.5]);
        assert_eq!(wn_mse_nowcast(&target, 1, 1).unwrap(), vec![0.5]);
        let err = wn_mse_nowcast(&target, 1, 3).unwrap_err();
        assert_eq!(err.code(), "span-too-small");
        // zero-padded target covering the span
        let padded = TargetFilter::new("MA(1)", 0, vec![1.0, 0.5, 0.0, 0.0]);
        assert_eq!(wn_mse_nowcast(&padded, 1, 3).unwrap(), vec![0.5, 0.0, 0.0]);
        assert_eq!(wn_mse_nowcast(&padded, 0, 1).unwrap(), vec![1.0]);
    }

    #[test]
    fn hp1600_nowcast_acf() {
        let hp = hp_two_sided(1600.0, 500).unwrap();
        let g = wn_mse_nowcast(&hp, 0, 101).unwrap();
        assert_abs_diff_eq!(crate::spectral::acf1(&g), 0.926, epsilon = 5e-3);
    }
}
