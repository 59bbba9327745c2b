use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ssa_core::empirics::SeriesKind;
use ssa_core::{Branch, Constraint, ProcessModel};

use crate::data::Transform;

#[derive(Debug, Parser)]
#[command(name = "ssa", version, about = "Filters that maximize sign accuracy at a fixed holding time")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute filter coefficients and write them with diagnostics.
    Solve(SolveArgs),
    /// Apply a coefficient file to a dated series.
    Filter(FilterArgs),
    /// Generate a seeded synthetic series, optionally filtered.
    Simulate(SimulateArgs),
    /// Run a reproducible validation experiment.
    Validate(ValidateArgs),
    /// Design a filter and apply it to an ingested series.
    Nowcast(NowcastArgs),
}

/// Two-sided target filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetChoice {
    Hp { lambda: f64 },
    Bk { period_low: f64, period_high: f64 },
}

impl std::fmt::Display for TargetChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TargetChoice::Hp { lambda } => write!(f, "hp:{lambda}"),
            TargetChoice::Bk { period_low, period_high } => write!(f, "bk:{period_low}:{period_high}"),
        }
    }
}

/// `hp:<lambda>` or `bk:<period_low>:<period_high>`.
pub fn parse_target(s: &str) -> Result<TargetChoice, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| format!("not a number: {p:?}"));
    match parts.as_slice() {
        ["hp", lambda] => Ok(TargetChoice::Hp { lambda: num(lambda)? }),
        ["bk", lo, hi] => Ok(TargetChoice::Bk {
            period_low: num(lo)?,
            period_high: num(hi)?,
        }),
        _ => Err("expected hp:<lambda> or bk:<low>:<high>".into()),
    }
}

fn coefficients(list: &str) -> Result<Vec<f64>, String> {
    if list.is_empty() {
        return Ok(Vec::new());
    }
    list.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("not a number: {p:?}")))
        .collect()
}

/// `wn`, `ar:<a1,a2,…>`, `arma:<ar list>/<ma list>` or a JSON file `{"ar":[…],"ma":[…]}`.
pub fn parse_model(s: &str) -> Result<ProcessModel, String> {
    let model = if s == "wn" {
        Ok(ProcessModel::white_noise())
    } else if let Some(rest) = s.strip_prefix("ar:") {
        ProcessModel::new(coefficients(rest)?, Vec::new())
    } else if let Some(rest) = s.strip_prefix("arma:") {
        let (ar, ma) = rest.split_once('/').ok_or("expected arma:<ar>/<ma>")?;
        ProcessModel::new(coefficients(ar)?, coefficients(ma)?)
    } else {
        let text = std::fs::read_to_string(s).map_err(|e| format!("{s}: {e}"))?;
        ProcessModel::from_json(&text)
    };
    model.map_err(|e| e.to_string())
}

/// `gaussian`, `t:<df>`, `ar:<a>` or `arima:<a>:<d>`.
pub fn parse_series_kind(s: &str) -> Result<SeriesKind, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| format!("not a number: {p:?}"));
    match parts.as_slice() {
        ["gaussian"] => Ok(SeriesKind::Gaussian),
        ["t", df] => Ok(SeriesKind::StudentT { df: num(df)? }),
        ["ar", a] => Ok(SeriesKind::Ar1 { a: num(a)? }),
        ["arima", a, d] => Ok(SeriesKind::Arima {
            model: ProcessModel::ar1(num(a)?).map_err(|e| e.to_string())?,
            d: d.parse().map_err(|_| format!("not an integer: {d:?}"))?,
        }),
        _ => Err("expected gaussian, t:<df>, ar:<a> or arima:<a>:<d>".into()),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    #[default]
    Auto,
    Smooth,
    Unsmooth,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Auto => Branch::Auto,
            BranchArg::Smooth => Branch::Smooth,
            BranchArg::Unsmooth => Branch::Unsmooth,
        }
    }
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct ConstraintArgs {
    /// Lag-one autocorrelation of the output.
    #[arg(long, allow_hyphen_values = true)]
    pub rho1: Option<f64>,
    /// Expected number of observations between sign changes.
    #[arg(long)]
    pub ht1: Option<f64>,
}

impl ConstraintArgs {
    pub fn constraint(&self) -> Constraint {
        match (self.rho1, self.ht1) {
            (Some(r), _) => Constraint::Rho(r),
            (None, Some(h)) => Constraint::HoldingTime(h),
            (None, None) => unreachable!("clap enforces one constraint"),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DesignArgs {
    /// hp:<lambda> or bk:<low>:<high>
    #[arg(long, value_parser = parse_target)]
    pub target: TargetChoice,
    /// Half span of the two-sided target; a default is derived from the target.
    #[arg(long)]
    pub span: Option<usize>,
    /// Filter length.
    #[arg(long = "L", visible_alias = "len", value_name = "L")]
    pub len: usize,
    /// Forecast horizon; negative values give backcasts.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub delta: i64,
    #[command(flatten)]
    pub constraint: ConstraintArgs,
    /// Model of the (differenced) data: wn, ar:<a…>, arma:<ar>/<ma> or a JSON file.
    #[arg(long, default_value = "wn", value_parser = parse_model)]
    pub model: ProcessModel,
    /// Integration order of the data.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=2))]
    pub d: u8,
    /// Length of the innovation-space representation (extended or integrated designs).
    #[arg(long = "len-tilde", value_name = "L_TILDE")]
    pub len_tilde: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    pub branch: BranchArg,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub design: DesignArgs,
    /// Output directory.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Coefficients as `lag,weight` CSV or as the full solution JSON.
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct NowcastArgs {
    #[command(flatten)]
    pub design: DesignArgs,
    /// Two-column date,value CSV.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Transformations applied before filtering, in order.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub transform: Vec<Transform>,
    /// Output directory.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    /// `lag,weight` coefficient CSV.
    #[arg(long, short)]
    pub coefficients: PathBuf,
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub transform: Vec<Transform>,
    /// Output CSV.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// gaussian, t:<df>, ar:<a> or arima:<a>:<d>
    #[arg(long, default_value = "gaussian", value_parser = parse_series_kind)]
    pub kind: SeriesKind,
    #[arg(long, short)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Optional filter applied to the simulated series.
    #[arg(long, short)]
    pub coefficients: Option<PathBuf>,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    /// Holding times under Student-t noise.
    HeavyTails,
    /// Empirical against theoretical holding times for Gaussian noise.
    Rice,
    /// Diagnostics of the HP(1600) designs on white noise.
    Table1,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum)]
    pub experiment: Experiment,
    #[arg(long, short, default_value_t = 1_000_000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, short)]
    pub out: PathBuf,
}
