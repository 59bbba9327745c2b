//! Simulation, filtering and sample diagnostics.
//!
//! All generators use ChaCha20 seeded from a `u64`. Student-t noise is built
//! from the same normal stream as Gaussian noise (the chi-square divisor uses
//! a separate stream), so experiments across degrees of freedom share common
//! random numbers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SsaError};
use crate::ssa::ht_from_rho;
use crate::stationary::ProcessModel;

/// Identifier of the random number generator, recorded in experiment outputs.
pub const RNG_ALGORITHM: &str = "chacha20";

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SSA_THREADS";

/// Observations discarded before ARMA recursions are recorded.
const BURN_IN: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeriesKind {
    Gaussian,
    /// Student-t scaled to unit variance.
    StudentT { df: f64 },
    Ar1 { a: f64 },
    /// ARMA model for the `d`-th differences, integrated `d` times.
    Arima { model: ProcessModel, d: usize },
}

impl SeriesKind {
    pub fn label(&self) -> String {
        match self {
            SeriesKind::Gaussian => "gaussian".into(),
            SeriesKind::StudentT { df } => format!("t({df})"),
            SeriesKind::Ar1 { a } => format!("ar1({a})"),
            SeriesKind::Arima { d, .. } => format!("arima(d={d})"),
        }
    }
}

fn normal_stream(seed: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

fn gaussian(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = normal_stream(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn student_t(df: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(df > 2.0) || !df.is_finite() {
        return Err(SsaError::domain(
            df,
            "degrees of freedom must exceed 2 for finite variance",
        ));
    }
    let chi = ChiSquared::new(df).map_err(|e| SsaError::domain(df, e.to_string()))?;
    let mut chi_rng = ChaCha20Rng::seed_from_u64(seed);
    chi_rng.set_stream(1);
    let unit = ((df - 2.0) / df).sqrt();
    Ok(gaussian(n, seed)
        .into_iter()
        .map(|z| {
            let v: f64 = chi.sample(&mut chi_rng);
            unit * z / (v / df).sqrt()
        })
        .collect())
}

fn arma(model: &ProcessModel, noise: &[f64]) -> Vec<f64> {
    let p = model.ar.len();
    let q = model.ma.len();
    let mut x = vec![0.0; noise.len()];
    for t in 0..noise.len() {
        let mut v = noise[t];
        for j in 0..q.min(t) {
            v += model.ma[j] * noise[t - j - 1];
        }
        for i in 0..p.min(t) {
            v += model.ar[i] * x[t - i - 1];
        }
        x[t] = v;
    }
    x
}

/// Simulated series of length `n`, reproducible for a fixed seed.
pub fn generate(kind: &SeriesKind, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(SsaError::InsufficientData { needed: 1, got: 0 });
    }
    match kind {
        SeriesKind::Gaussian => Ok(gaussian(n, seed)),
        SeriesKind::StudentT { df } => student_t(*df, n, seed),
        SeriesKind::Ar1 { a } => {
            if !(a.abs() < 1.0) {
                return Err(SsaError::Model(format!("AR(1) coefficient {a} is not stationary")));
            }
            let e = gaussian(n, seed);
            let mut x = Vec::with_capacity(n);
            // start in the stationary distribution
            let mut prev = e[0] / (1.0 - a * a).sqrt();
            x.push(prev);
            for &eps in &e[1..] {
                prev = a * prev + eps;
                x.push(prev);
            }
            Ok(x)
        }
        SeriesKind::Arima { model, d } => {
            let e: Vec<f64> = gaussian(n + BURN_IN, seed)
                .into_iter()
                .map(|z| model.sigma * z)
                .collect();
            let mut x = arma(model, &e).split_off(BURN_IN);
            for _ in 0..*d {
                for t in 1..n {
                    x[t] += x[t - 1];
                }
            }
            Ok(x)
        }
    }
}

/// Causal convolution; element `i` of the output belongs to input index `i + L − 1`.
pub fn apply_filter(b: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let len = b.len();
    if len == 0 {
        return Err(SsaError::InvalidDimension("empty filter".into()));
    }
    if x.len() < len {
        return Err(SsaError::InsufficientData {
            needed: len,
            got: x.len(),
        });
    }
    Ok((len - 1..x.len())
        .map(|t| b.iter().enumerate().map(|(k, bk)| bk * x[t - k]).sum())
        .collect())
}

/// Indices `t` with a sign change between `t` and `t + 1`; zeros carry the previous sign.
pub fn sign_changes(y: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut prev: Option<bool> = None;
    for (t, &v) in y.iter().enumerate() {
        let sign = if v > 0.0 {
            Some(true)
        } else if v < 0.0 {
            Some(false)
        } else {
            prev
        };
        if let (Some(p), Some(s)) = (prev, sign) {
            if p != s {
                out.push(t - 1);
            }
        }
        prev = sign;
    }
    out
}

fn holding_time_of(crossings: &[usize]) -> Result<f64> {
    if crossings.len() < 2 {
        return Err(SsaError::UndefinedHoldingTime {
            crossings: crossings.len(),
        });
    }
    let span = (crossings[crossings.len() - 1] - crossings[0]) as f64;
    Ok(span / (crossings.len() - 1) as f64)
}

/// Mean distance between consecutive sign changes.
pub fn empirical_holding_time(y: &[f64]) -> Result<f64> {
    if y.len() < 2 {
        return Err(SsaError::InsufficientData {
            needed: 2,
            got: y.len(),
        });
    }
    holding_time_of(&sign_changes(y))
}

pub fn sample_mean(y: &[f64]) -> f64 {
    y.iter().sum::<f64>() / y.len() as f64
}

/// Mean-corrected lag-one sample autocorrelation.
pub fn sample_acf1(y: &[f64]) -> f64 {
    let m = sample_mean(y);
    let num: f64 = y.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    let den: f64 = y.iter().map(|v| (v - m) * (v - m)).sum();
    num / den
}

pub fn sample_variance(y: &[f64]) -> f64 {
    let m = sample_mean(y);
    y.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / y.len() as f64
}

fn check_same_len(y: &[f64], z: &[f64]) -> Result<()> {
    if y.len() != z.len() {
        return Err(SsaError::DimensionMismatch {
            expected: y.len(),
            actual: z.len(),
        });
    }
    if y.is_empty() {
        return Err(SsaError::InsufficientData { needed: 1, got: 0 });
    }
    Ok(())
}

pub fn sample_mse(y: &[f64], z: &[f64]) -> Result<f64> {
    check_same_len(y, z)?;
    Ok(y.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / y.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignAgreement {
    /// Share of strictly positive products among non-tied pairs.
    pub accuracy: f64,
    /// Pairs where either series is exactly zero.
    pub ties: usize,
}

pub fn sample_sign_accuracy(y: &[f64], z: &[f64]) -> Result<SignAgreement> {
    check_same_len(y, z)?;
    let (mut hits, mut ties) = (0usize, 0usize);
    for (a, b) in y.iter().zip(z) {
        let p = a * b;
        if p > 0.0 {
            hits += 1;
        } else if *a == 0.0 || *b == 0.0 {
            ties += 1;
        }
    }
    let counted = y.len() - ties;
    let accuracy = if counted == 0 {
        f64::NAN
    } else {
        hits as f64 / counted as f64
    };
    Ok(SignAgreement { accuracy, ties })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDiagnostics {
    pub sample_acf1: f64,
    /// `None` when fewer than two sign changes occur.
    pub sample_ht: Option<f64>,
    pub crossings: Vec<usize>,
    pub sample_mse: Option<f64>,
    pub sample_sign_accuracy: Option<SignAgreement>,
}

impl SeriesDiagnostics {
    /// Diagnostics of `y`, optionally against an aligned reference series.
    pub fn compute(y: &[f64], reference: Option<&[f64]>) -> Result<Self> {
        if y.len() < 2 {
            return Err(SsaError::InsufficientData {
                needed: 2,
                got: y.len(),
            });
        }
        let crossings = sign_changes(y);
        let (sample_mse, sample_sign_accuracy) = match reference {
            Some(z) => (Some(sample_mse(y, z)?), Some(sample_sign_accuracy(y, z)?)),
            None => (None, None),
        };
        Ok(Self {
            sample_acf1: sample_acf1(y),
            sample_ht: holding_time_of(&crossings).ok(),
            crossings,
            sample_mse,
            sample_sign_accuracy,
        })
    }
}

/// Runs `f` on a pool capped by `SSA_THREADS` when set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .unwrap_or_else(|_| panic!("cannot build a pool with {n} threads")),
        _ => f(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub label: String,
    pub values: Vec<f64>,
}

/// Empirical holding times per noise distribution and filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeavyTailTable {
    pub filters: Vec<String>,
    pub rows: Vec<ExperimentRow>,
    pub n: usize,
    pub seed: u64,
    pub rng: String,
}

impl HeavyTailTable {
    pub fn row(&self, label: &str) -> Option<&ExperimentRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Header `distribution,<filter>…`, one line per row.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "distribution")?;
        for f in &self.filters {
            write!(out, ",{f}")?;
        }
        writeln!(out)?;
        for r in &self.rows {
            write!(out, "{}", r.label)?;
            for v in &r.values {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Holding times of each filter on t-distributed noise for each `df`, plus Gaussian and theoretical rows.
///
/// Every distribution uses the same seed, so rows differ only through the tails.
pub fn heavy_tail_experiment(
    filters: &[(String, Vec<f64>)],
    dfs: &[f64],
    n: usize,
    seed: u64,
) -> Result<HeavyTailTable> {
    let names = filters.iter().map(|(n, _)| n.clone()).collect();
    let mut table = HeavyTailTable {
        filters: names,
        rows: Vec::new(),
        n,
        seed,
        rng: RNG_ALGORITHM.into(),
    };
    if filters.is_empty() {
        return Ok(table);
    }
    let mut kinds: Vec<SeriesKind> = dfs.iter().map(|&df| SeriesKind::StudentT { df }).collect();
    kinds.push(SeriesKind::Gaussian);
    let rows: Result<Vec<ExperimentRow>> = with_thread_cap(|| {
        kinds
            .par_iter()
            .map(|kind| {
                let x = generate(kind, n, seed)?;
                let values = filters
                    .iter()
                    .map(|(_, b)| empirical_holding_time(&apply_filter(b, &x)?))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(ExperimentRow {
                    label: kind.label(),
                    values,
                })
            })
            .collect()
    });
    table.rows = rows?;
    let theory = filters
        .iter()
        .map(|(_, b)| ht_from_rho(crate::spectral::acf1(b)))
        .collect::<Result<Vec<f64>>>()?;
    table.rows.push(ExperimentRow {
        label: "theoretical".into(),
        values: theory,
    });
    Ok(table)
}

/// Uniform draw helper for seeded random filters in experiments.
pub fn random_filter(len: usize, rng: &mut ChaCha20Rng) -> Vec<f64> {
    (0..len).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reproducible() {
        let a = generate(&SeriesKind::StudentT { df: 4.0 }, 100, 9).unwrap();
        let b = generate(&SeriesKind::StudentT { df: 4.0 }, 100, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate(&SeriesKind::StudentT { df: 4.0 }, 100, 10).unwrap());
    }

    #[test]
    fn infinite_variance_rejected() {
        let err = generate(&SeriesKind::StudentT { df: 2.0 }, 10, 1).unwrap_err();
        assert_eq!(err.code(), "domain");
        assert!(generate(&SeriesKind::Ar1 { a: 1.0 }, 10, 1).is_err());
    }

    #[test]
    fn filtering() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(apply_filter(&[1.0], &x).unwrap(), x.to_vec());
        assert_eq!(apply_filter(&[0.5, 0.5], &[1.0, 1.0, 1.0]).unwrap(), vec![1.0, 1.0]);
        let b = [0.3, -0.1, 0.7];
        let mut imp = vec![0.0; 7];
        imp[2] = 1.0;
        // impulse response: the output replays the coefficients in lag order
        assert_eq!(apply_filter(&b, &imp).unwrap(), vec![0.3, -0.1, 0.7, 0.0, 0.0]);
        assert_eq!(
            apply_filter(&b, &[1.0]).unwrap_err(),
            SsaError::InsufficientData { needed: 3, got: 1 }
        );
    }

    #[test]
    fn holding_times() {
        let alt: Vec<f64> = (0..20).map(|t| if t % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(empirical_holding_time(&alt).unwrap(), 1.0);
        // zeros inherit the sign before them
        let y = [1.0, 0.0, 0.0, -1.0, 0.0, 2.0, 3.0, -1.0];
        assert_eq!(sign_changes(&y), vec![2, 4, 6]);
        assert_eq!(empirical_holding_time(&y).unwrap(), 2.0);
        assert_eq!(
            empirical_holding_time(&[1.0, 2.0, -1.0]).unwrap_err(),
            SsaError::UndefinedHoldingTime { crossings: 1 }
        );
    }

    #[test]
    fn sign_agreement() {
        let y = [1.0, -2.0, 0.5, 0.0];
        let s = sample_sign_accuracy(&y, &y).unwrap();
        assert_eq!((s.accuracy, s.ties), (1.0, 1));
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        assert_eq!(sample_sign_accuracy(&y, &neg).unwrap().accuracy, 0.0);
        assert!(sample_sign_accuracy(&y, &y[..2]).is_err());
    }

    #[test]
    fn ar1_sample_acf() {
        let x = generate(&SeriesKind::Ar1 { a: 0.6 }, 200_000, 3).unwrap();
        assert_abs_diff_eq!(sample_acf1(&x), 0.6, epsilon = 0.01);
    }

    #[test]
    fn empty_experiment() {
        let t = heavy_tail_experiment(&[], &[4.0], 1000, 1).unwrap();
        assert!(t.rows.is_empty());
    }

    #[test]
    fn experiment_csv_shape() {
        let filters = vec![("ma".to_string(), vec![1.0, 1.0])];
        let t = heavy_tail_experiment(&filters, &[4.0], 10_000, 1).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "distribution,ma");
        assert!(lines[1].starts_with("t(4),"));
        assert!(lines[2].starts_with("gaussian,"));
        let theory: f64 = lines[3].strip_prefix("theoretical,").unwrap().parse().unwrap();
        assert_abs_diff_eq!(theory, 3.0, epsilon = 1e-12);
    }
}
