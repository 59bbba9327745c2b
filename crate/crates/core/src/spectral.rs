//! The lag-one autocovariance matrix `M` and its closed-form eigenbasis.
//!
//! For a filter `b` of length `L` fed with standardized white noise,
//! `b'Mb = Σ b_{k-1} b_k` is the first-order autocovariance of the output.
//! `M` is symmetric tridiagonal Toeplitz (zero diagonal, 0.5 off-diagonal),
//! so its eigenpairs are known analytically:
//!
//! ```text
//! λ_j = cos(ω_j),   v_j ∝ (sin(k ω_j))_{k=1..L},   ω_j = jπ/(L+1)
//! ```
//!
//! Everything in the solver is expressed in this basis.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SsaError};

/// Largest filter length for which dense `L×L` matrices are materialized.
pub const MAX_DENSE_LEN: usize = 2048;

/// Default threshold, relative to `max|w_i|`, below which a spectral weight counts as zero.
pub const DEFAULT_TOL_NZ: f64 = 1e-10;

fn check_len(len: usize) -> Result<()> {
    if len == 0 {
        return Err(SsaError::InvalidDimension("filter length must be at least 1".into()));
    }
    if len > MAX_DENSE_LEN {
        return Err(SsaError::InvalidDimension(format!(
            "filter length {len} exceeds the dense limit {MAX_DENSE_LEN}"
        )));
    }
    Ok(())
}

/// Dense `L×L` matrix with 0.5 on both first off-diagonals.
pub fn build_m(len: usize) -> Result<DMatrix<f64>> {
    check_len(len)?;
    let mut m = DMatrix::zeros(len, len);
    for k in 1..len {
        m[(k - 1, k)] = 0.5;
        m[(k, k - 1)] = 0.5;
    }
    Ok(m)
}

/// `Σ_{k≥1} b_{k-1} b_k`, i.e. `b'Mb` without forming `M`.
pub fn lag_one_product(b: &[f64]) -> f64 {
    b.windows(2).map(|w| w[0] * w[1]).sum()
}

/// First-order autocorrelation `b'Mb / b'b` of the output of `b` under white noise.
pub fn acf1(b: &[f64]) -> f64 {
    let energy: f64 = b.iter().map(|x| x * x).sum();
    lag_one_product(b) / energy
}

/// `ρ_max(L) = cos(π/(L+1))`, the largest attainable lag-one autocorrelation.
pub fn rho_max(len: usize) -> f64 {
    (PI / (len as f64 + 1.0)).cos()
}

/// Closed-form eigenpairs of `M`, ordered by decreasing eigenvalue.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    eigenvalues: Vec<f64>,
    /// Column `j` is the unit eigenvector for `eigenvalues[j]`.
    eigenvectors: DMatrix<f64>,
}

impl SpectralBasis {
    pub fn new(len: usize) -> Result<Self> {
        check_len(len)?;
        let step = PI / (len as f64 + 1.0);
        let eigenvalues = (1..=len).map(|j| (j as f64 * step).cos()).collect();
        // Σ_k sin²(k j π/(L+1)) = (L+1)/2 for every j in 1..=L.
        let norm = (2.0 / (len as f64 + 1.0)).sqrt();
        let eigenvectors = DMatrix::from_fn(len, len, |k, j| {
            norm * (((k + 1) * (j + 1)) as f64 * step).sin()
        });
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Unit eigenvector `v_{j+1}` (zero-based `j`).
    pub fn eigenvector(&self, j: usize) -> Vec<f64> {
        self.eigenvectors.column(j).iter().copied().collect()
    }

    pub fn rho_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `V'x`.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.len() {
            return Err(SsaError::DimensionMismatch {
                expected: self.len(),
                actual: x.len(),
            });
        }
        let x = DVector::from_column_slice(x);
        Ok((self.eigenvectors.tr_mul(&x)).iter().copied().collect())
    }

    /// `V w`.
    pub fn synthesize(&self, w: &[f64]) -> Result<Vec<f64>> {
        if w.len() != self.len() {
            return Err(SsaError::DimensionMismatch {
                expected: self.len(),
                actual: w.len(),
            });
        }
        let w = DVector::from_column_slice(w);
        Ok((&self.eigenvectors * w).iter().copied().collect())
    }
}

/// Analytic eigenpairs of `build_m(len)`.
pub fn eigenpairs(len: usize) -> Result<SpectralBasis> {
    SpectralBasis::new(len)
}

/// Decomposition `γ_δ = Σ w_i v_i` together with the support `NZ = {i : w_i ≠ 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralWeights {
    pub w: Vec<f64>,
    /// Zero-based indices of non-vanishing weights.
    pub nz_set: Vec<usize>,
}

impl SpectralWeights {
    pub fn is_complete(&self) -> bool {
        self.nz_set.len() == self.w.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.nz_set.binary_search(&i).is_ok()
    }

    /// Lag-one autocorrelation of the filter itself, `Σ λ_i w_i² / Σ w_i²`.
    pub fn rho_mse(&self, basis: &SpectralBasis) -> f64 {
        let (num, den) = self
            .nz_set
            .iter()
            .fold((0.0, 0.0), |(n, d), &i| {
                let w2 = self.w[i] * self.w[i];
                (n + basis.eigenvalues()[i] * w2, d + w2)
            });
        num / den
    }
}

/// Projects `gamma` onto the eigenbasis. `tol_nz` is relative to `max|w_i|`.
pub fn spectral_weights(gamma: &[f64], basis: &SpectralBasis, tol_nz: f64) -> Result<SpectralWeights> {
    let w = basis.project(gamma)?;
    let w_max = w.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if w_max == 0.0 || !w_max.is_finite() {
        return Err(SsaError::Identifiability(
            "MSE predictor is identically zero".into(),
        ));
    }
    let cutoff = tol_nz * w_max;
    let nz_set = w
        .iter()
        .enumerate()
        .filter(|(_, x)| x.abs() > cutoff)
        .map(|(i, _)| i)
        .collect();
    Ok(SpectralWeights { w, nz_set })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quadratic_form_matches_explicit_sum() {
        let m = build_m(2).unwrap();
        let b = DVector::from_vec(vec![1.0, 1.0]);
        assert_abs_diff_eq!((b.transpose() * &m * &b)[0], 1.0);

        let b3 = [1.0, 1.0, 0.0];
        assert_abs_diff_eq!(lag_one_product(&b3), 1.0);
        assert_abs_diff_eq!(acf1(&b3), 0.5);
        assert_abs_diff_eq!(lag_one_product(&[1.0, 0.0, -1.0]), 0.0);
    }

    #[test]
    fn zero_length_is_rejected() {
        assert!(matches!(build_m(0), Err(SsaError::InvalidDimension(_))));
        assert!(matches!(eigenpairs(0), Err(SsaError::InvalidDimension(_))));
    }

    #[test]
    fn three_point_basis() {
        let basis = eigenpairs(3).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(basis.eigenvalues()[0], s, epsilon = 1e-15);
        assert_abs_diff_eq!(basis.eigenvalues()[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(basis.eigenvalues()[2], -s, epsilon = 1e-15);
        let v1 = basis.eigenvector(0);
        assert_abs_diff_eq!(v1[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(v1[1], s, epsilon = 1e-15);
        assert_abs_diff_eq!(v1[2], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn rho_max_at_101() {
        assert_abs_diff_eq!(rho_max(101), 0.99953, epsilon = 5e-6);
        assert_abs_diff_eq!(eigenpairs(101).unwrap().rho_max(), rho_max(101));
    }

    #[test]
    fn eigenvector_has_unit_weight() {
        let basis = eigenpairs(6).unwrap();
        let sw = spectral_weights(&basis.eigenvector(1), &basis, DEFAULT_TOL_NZ).unwrap();
        for (i, w) in sw.w.iter().enumerate() {
            assert_abs_diff_eq!(*w, if i == 1 { 1.0 } else { 0.0 }, epsilon = 1e-14);
        }
        assert_eq!(sw.nz_set, vec![1]);
        assert!(!sw.is_complete());
    }

    #[test]
    fn band_limited_support() {
        let basis = eigenpairs(10).unwrap();
        let mut w = vec![0.0; 10];
        for x in w.iter_mut().skip(3) {
            *x = 1.0 / 7f64.sqrt();
        }
        let gamma = basis.synthesize(&w).unwrap();
        let sw = spectral_weights(&gamma, &basis, DEFAULT_TOL_NZ).unwrap();
        assert_eq!(sw.nz_set, (3..10).collect::<Vec<_>>());
        assert_abs_diff_eq!(sw.w[5], 0.378, epsilon = 1e-3);
    }

    #[test]
    fn zero_target_is_not_identifiable() {
        let basis = eigenpairs(4).unwrap();
        let err = spectral_weights(&[0.0; 4], &basis, DEFAULT_TOL_NZ).unwrap_err();
        assert_eq!(err.code(), "identifiability");
    }

    #[test]
    fn dimension_mismatch() {
        let basis = eigenpairs(4).unwrap();
        assert!(matches!(
            basis.project(&[1.0, 2.0]),
            Err(SsaError::DimensionMismatch { expected: 4, actual: 2 })
        ));
    }
}
