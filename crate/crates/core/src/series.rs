//! Truncated formal power series in the backshift operator `B`.
//!
//! The first `n` coefficients of a product or reciprocal depend only on the
//! first `n` coefficients of the inputs, so truncation at order `n` is exact
//! for those coefficients.

/// First `n` coefficients of `a(B)·b(B)`.
pub fn mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (i, &ai) in a.iter().enumerate().take(n) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// First `n` coefficients of `1/a(B)` for `a_0 = 1`.
pub fn reciprocal(a: &[f64], n: usize) -> Vec<f64> {
    debug_assert!(a.first().copied() == Some(1.0));
    let mut out = vec![0.0; n];
    if n == 0 {
        return out;
    }
    out[0] = 1.0;
    for k in 1..n {
        let s: f64 = (1..=k.min(a.len().saturating_sub(1)))
            .map(|j| a[j] * out[k - j])
            .sum();
        out[k] = -s;
    }
    out
}

/// First `n` coefficients of `a(B)/(1−B)^d` (repeated partial sums).
pub fn integrate(a: &[f64], d: usize, n: usize) -> Vec<f64> {
    let mut out: Vec<f64> = (0..n).map(|k| a.get(k).copied().unwrap_or(0.0)).collect();
    for _ in 0..d {
        for k in 1..n {
            out[k] += out[k - 1];
        }
    }
    out
}

/// First `n` coefficients of `(1−B)^d·a(B)`.
pub fn difference(a: &[f64], d: usize, n: usize) -> Vec<f64> {
    let mut out: Vec<f64> = (0..n).map(|k| a.get(k).copied().unwrap_or(0.0)).collect();
    for _ in 0..d {
        for k in (1..n).rev() {
            out[k] -= out[k - 1];
        }
    }
    out
}
