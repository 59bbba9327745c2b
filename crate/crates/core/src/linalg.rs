//! Small dense and banded solvers used by the target and integrated modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SsaError};

/// Cholesky factor of a symmetric positive definite band matrix.
///
/// Storage is row-wise lower band: `rows[i][j]` holds `L[i, i - bw + j]`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    rows: Vec<Vec<f64>>,
}

impl BandCholesky {
    /// Factors the matrix whose lower band entry `(i, i - d)` is `entry(i, d)` for `d` in `0..=bw`.
    pub fn factor(n: usize, bw: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut rows = vec![vec![0.0; bw + 1]; n];
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut s = entry(i, i - j);
                let k0 = j.saturating_sub(bw).max(j0);
                for k in k0..j {
                    s -= rows[i][k + bw - i] * rows[j][k + bw - j];
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(SsaError::Singular(format!(
                            "band matrix not positive definite at pivot {i}"
                        )));
                    }
                    rows[i][bw] = s.sqrt();
                } else {
                    rows[i][j + bw - i] = s / rows[j][bw];
                }
            }
        }
        Ok(Self { n, bw, rows })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.n, self.bw);
        let mut y = rhs.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.rows[i][k + bw - i] * y[k];
            }
            y[i] = s / self.rows[i][bw];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n.min(i + bw + 1) {
                s -= self.rows[k][i + bw - k] * y[k];
            }
            y[i] = s / self.rows[i][bw];
        }
        y
    }
}

/// Lower band of `I + λ D₂'D₂` on a window of `n` points.
pub(crate) fn hp_band_entry(n: usize, lambda: f64) -> impl Fn(usize, usize) -> f64 {
    // D₂'D₂ has rows (1,-2,1) stacked; its band entries depend on the distance to each edge.
    move |i, d| {
        let coupling = |i: usize, j: usize| -> f64 {
            // Σ_r D[r,i] D[r,j] over second-difference rows r = 0..n-2
            let c = [1.0, -2.0, 1.0];
            let lo = i.max(j).saturating_sub(2);
            let hi = i.min(j).min(n.saturating_sub(3));
            if n < 3 || lo > hi {
                return 0.0;
            }
            (lo..=hi).map(|r| c[i - r] * c[j - r]).sum()
        };
        let j = i - d;
        let base = if d == 0 { 1.0 } else { 0.0 };
        base + lambda * coupling(i, j)
    }
}

/// Solves `a x = b` by LU with two steps of iterative refinement.
pub fn solve_refined(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let lu = a.clone().lu();
    let mut x = lu
        .solve(b)
        .ok_or_else(|| SsaError::Singular("LU factorization failed".into()))?;
    for _ in 0..2 {
        let r = b - a * &x;
        match lu.solve(&r) {
            Some(dx) => x += dx,
            None => break,
        }
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(SsaError::Singular("non-finite solution".into()));
    }
    Ok(x)
}

/// 2-norm condition number via singular values.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}
