//! Subcommand execution. Every command returns the artifacts it wrote.

use std::io::Write;
use std::path::{Path, PathBuf};

use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;
use ssa_core::empirics::{
    apply_filter, empirical_holding_time, generate, heavy_tail_experiment, random_filter,
    sign_changes, with_thread_cap, SeriesKind,
};
use ssa_core::spectral::acf1;
use ssa_core::ssa::{self, ht_from_rho};
use ssa_core::stationary::{mse_predictor_integrated, solve_ssa_dependent, solve_ssa_extended};
use ssa_core::targets::{bk_two_sided, hp_default_half_span, hp_two_sided};
use ssa_core::{IntegratedConfig, SsaConfig, SsaProblem, SsaSolution, TargetSpec};

use crate::args::{
    Command, DesignArgs, Experiment, FilterArgs, Format, NowcastArgs, SimulateArgs, SolveArgs,
    TargetChoice, ValidateArgs,
};
use crate::data::{self, create, ingest_csv, read_coefficients, transform, write_series};
use crate::error::{CliError, Result};

/// Heavy-tail experiment degrees of freedom.
pub const HEAVY_TAIL_DFS: [f64; 6] = [2.1, 4.0, 6.0, 8.0, 10.0, 100.0];

/// Summary written to `diagnostics.json`.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub target: String,
    pub length: usize,
    pub delta: i64,
    pub d: u8,
    /// `white-noise`, `dependent`, `extended` or `integrated`.
    pub solver: &'static str,
    pub rho1: f64,
    /// `smooth` for `ν > 0`, `unsmooth` for `ν < 0`.
    pub branch: Option<&'static str>,
    pub kind: Option<ssa_core::SolutionKind>,
    pub nu: Option<f64>,
    pub lambda_tilde: Option<f64>,
    pub target_correlation: Option<f64>,
    /// For integrated designs, of the differenced output.
    pub acf1: f64,
    pub holding_time: f64,
    pub sign_accuracy: Option<f64>,
    /// Mean squared error against the target or, for integrated designs, the MSE benchmark.
    pub mse: f64,
    pub iterations: usize,
    pub residual: f64,
    pub coefficient_sum: f64,
    pub gamma0: Option<f64>,
    pub gamma0_dot: Option<f64>,
    pub condition_number: Option<f64>,
}

/// A solved design: coefficients for the observed series plus its MSE benchmark.
#[derive(Debug, Clone)]
pub struct Design {
    pub coefficients: Vec<f64>,
    pub benchmark: Vec<f64>,
    pub report: DiagnosticsReport,
    pub solution_json: String,
}

pub fn run(command: &Command) -> Result<Vec<PathBuf>> {
    match command {
        Command::Solve(a) => solve(a),
        Command::Filter(a) => filter(a),
        Command::Simulate(a) => simulate(a),
        Command::Validate(a) => validate(a),
        Command::Nowcast(a) => nowcast(a),
    }
}

pub fn target_spec(args: &DesignArgs) -> Result<TargetSpec> {
    if args.len < 3 {
        return Err(CliError::Usage("--L must be at least 3".into()));
    }
    let reach = args.len + args.delta.unsigned_abs() as usize;
    let filter = match args.target {
        TargetChoice::Hp { lambda } => {
            let span = args.span.unwrap_or_else(|| hp_default_half_span(lambda).max(reach));
            hp_two_sided(lambda, span)?
        }
        TargetChoice::Bk { period_low, period_high } => {
            let span = args
                .span
                .unwrap_or_else(|| reach.max((3.0 * period_high).ceil() as usize));
            bk_two_sided(period_low, period_high, span)?
        }
    };
    Ok(TargetSpec::new(filter, args.delta, args.len))
}

fn branch_of(nu: Option<f64>) -> Option<&'static str> {
    nu.map(|v| if v > 0.0 { "smooth" } else { "unsmooth" })
}

fn ssa_report(args: &DesignArgs, solver: &'static str, coefficients: &[f64], s: &SsaSolution) -> DiagnosticsReport {
    DiagnosticsReport {
        target: args.target.to_string(),
        length: args.len,
        delta: args.delta,
        d: args.d,
        solver,
        rho1: s.rho1,
        branch: branch_of(s.nu),
        kind: Some(s.kind),
        nu: s.nu,
        lambda_tilde: None,
        target_correlation: Some(s.diagnostics.target_correlation),
        acf1: s.diagnostics.acf1,
        holding_time: s.diagnostics.holding_time,
        sign_accuracy: Some(s.diagnostics.sign_accuracy),
        mse: s.diagnostics.mse_vs_target,
        iterations: s.iterations,
        residual: s.residual,
        coefficient_sum: coefficients.iter().sum(),
        gamma0: None,
        gamma0_dot: None,
        condition_number: None,
    }
}

pub fn design(args: &DesignArgs) -> Result<Design> {
    let spec = target_spec(args)?;
    let constraint = args.constraint.constraint();
    if args.d > 0 {
        let mut config = IntegratedConfig::new(args.d as usize, constraint, args.model.clone());
        if let Some(lt) = args.len_tilde {
            config = config.with_len_tilde(lt);
        }
        let benchmark = mse_predictor_integrated(&spec, &args.model, config.d)?;
        let s = ssa_core::integrated::solve_integrated(&spec, &config)?;
        info!("integrated design: lambda_tilde = {}, {} root(s)", s.lambda_tilde, s.roots.len());
        let report = DiagnosticsReport {
            target: args.target.to_string(),
            length: args.len,
            delta: args.delta,
            d: args.d,
            solver: "integrated",
            rho1: s.rho1,
            branch: None,
            kind: None,
            nu: None,
            lambda_tilde: Some(s.lambda_tilde),
            target_correlation: None,
            acf1: s.diagnostics.acf1_of_diff,
            holding_time: s.diagnostics.ht_of_diff,
            sign_accuracy: None,
            mse: s.diagnostics.mse_vs_benchmark,
            iterations: s.iterations,
            residual: s.residual,
            coefficient_sum: s.b_x.iter().sum(),
            gamma0: Some(s.gamma0),
            gamma0_dot: s.gamma0_dot,
            condition_number: Some(s.diagnostics.condition_number),
        };
        return Ok(Design {
            coefficients: s.b_x.clone(),
            benchmark,
            report,
            solution_json: s.to_json(),
        });
    }
    let config = SsaConfig::new(constraint).with_branch(args.branch.into());
    if args.model.is_white_noise() && args.len_tilde.is_none() {
        let problem = SsaProblem::from_target(&spec)?;
        let s = ssa::solve(&problem, &config)?;
        let report = ssa_report(args, "white-noise", &s.b, &s);
        return Ok(Design {
            coefficients: s.b.clone(),
            benchmark: problem.gamma_delta,
            report,
            solution_json: s.to_json(),
        });
    }
    let (solver, s) = match args.len_tilde {
        Some(lt) => ("extended", solve_ssa_extended(&spec, &args.model, &config, lt)?),
        None => ("dependent", solve_ssa_dependent(&spec, &args.model, &config)?),
    };
    let report = ssa_report(args, solver, &s.b_x, &s.solution);
    let solution_json = serde_json::to_string_pretty(&s).expect("solution serializes");
    Ok(Design {
        coefficients: s.b_x,
        benchmark: s.mse_predictor,
        report,
        solution_json,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut out = create(path)?;
    out.write_all(text.as_bytes())
        .and_then(|_| out.write_all(b"\n"))
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(path.display().to_string(), e))
}

fn write_coefficients(path: &Path, b: &[f64]) -> Result<()> {
    let mut out = create(path)?;
    ssa_core::io::write_lag_weight_csv(&mut out, (0i64..).zip(b.iter().copied()))
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(path.display().to_string(), e))
}

fn out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))
}

fn write_design(design: &Design, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    out_dir(dir)?;
    let mut written = Vec::new();
    let coef = match format {
        Format::Csv => {
            let p = dir.join("coefficients.csv");
            write_coefficients(&p, &design.coefficients)?;
            p
        }
        Format::Json => {
            let p = dir.join("solution.json");
            write_text(&p, &design.solution_json)?;
            p
        }
    };
    written.push(coef);
    let p = dir.join("diagnostics.json");
    write_text(&p, &serde_json::to_string_pretty(&design.report).expect("report serializes"))?;
    written.push(p);
    Ok(written)
}

fn solve(args: &SolveArgs) -> Result<Vec<PathBuf>> {
    let d = design(&args.design)?;
    write_design(&d, &args.out, args.format)
}

fn filter(args: &FilterArgs) -> Result<Vec<PathBuf>> {
    let b = read_coefficients(&args.coefficients)?;
    let x = transform(ingest_csv(&args.input)?, &args.transform)?;
    let y = apply_filter(&b, &x.values)?;
    write_series(&args.out, &x.dates[b.len() - 1..], &y)?;
    Ok(vec![args.out.clone()])
}

/// Differenced outputs with a flag on the first observation after each sign change.
fn write_crossings(path: &Path, dates: &[String], ssa: &[f64], mse: &[f64]) -> Result<()> {
    let diff = |y: &[f64]| -> Vec<f64> { y.windows(2).map(|w| w[1] - w[0]).collect() };
    let flags = |dy: &[f64]| -> Vec<u8> {
        let mut f = vec![0u8; dy.len()];
        for t in sign_changes(dy) {
            f[t + 1] = 1;
        }
        f
    };
    let (ds, dm) = (diff(ssa), diff(mse));
    let (fs, fm) = (flags(&ds), flags(&dm));
    let mut out = create(path)?;
    let io = |e| CliError::io(path.display().to_string(), e);
    writeln!(out, "date,ssa_diff,ssa_crossing,mse_diff,mse_crossing").map_err(io)?;
    for i in 0..ds.len() {
        writeln!(out, "{},{:?},{},{:?},{}", dates[i + 1], ds[i], fs[i], dm[i], fm[i]).map_err(io)?;
    }
    out.flush().map_err(io)
}

fn nowcast(args: &NowcastArgs) -> Result<Vec<PathBuf>> {
    let x = transform(ingest_csv(&args.input)?, &args.transform)?;
    let d = design(&args.design)?;
    let y = apply_filter(&d.coefficients, &x.values)?;
    let dates = &x.dates[d.coefficients.len() - 1..];
    let mut written = write_design(&d, &args.out, Format::Csv)?;
    let p = args.out.join("nowcast.csv");
    write_series(&p, dates, &y)?;
    written.push(p);
    if args.design.d == 1 {
        let benchmark = apply_filter(&d.benchmark, &x.values)?;
        let p = args.out.join("crossings.csv");
        write_crossings(&p, dates, &y, &benchmark)?;
        written.push(p);
    }
    Ok(written)
}

fn simulate(args: &SimulateArgs) -> Result<Vec<PathBuf>> {
    let x = generate(&args.kind, args.n, args.seed)?;
    let (offset, y) = match &args.coefficients {
        Some(path) => {
            let b = read_coefficients(path)?;
            (b.len() - 1, apply_filter(&b, &x)?)
        }
        None => (0, x),
    };
    let mut out = create(&args.out)?;
    let io = |e| CliError::io(args.out.display().to_string(), e);
    writeln!(out, "index,value").map_err(io)?;
    for (i, v) in y.iter().enumerate() {
        writeln!(out, "{},{v:?}", i + offset).map_err(io)?;
    }
    out.flush().map_err(io)?;
    Ok(vec![args.out.clone()])
}

fn hp1600_designs() -> Result<Vec<(String, SsaSolution)>> {
    let spec = TargetSpec::new(hp_two_sided(1600.0, 500)?, 0, 101);
    let problem = SsaProblem::from_target(&spec)?;
    let mut out = Vec::new();
    for rho1 in [0.97, 0.8] {
        out.push((format!("ssa({rho1})"), ssa::solve(&problem, &SsaConfig::rho(rho1))?));
    }
    Ok(out)
}

fn validate(args: &ValidateArgs) -> Result<Vec<PathBuf>> {
    let io = |e| CliError::io(args.out.display().to_string(), e);
    match args.experiment {
        Experiment::HeavyTails => {
            let spec = TargetSpec::new(hp_two_sided(1600.0, 500)?, 0, 101);
            let mut filters = vec![("mse".to_string(), spec.mse_nowcast()?)];
            filters.extend(hp1600_designs()?.into_iter().map(|(n, s)| (n, s.b)));
            let table = heavy_tail_experiment(&filters, &HEAVY_TAIL_DFS, args.n, args.seed)?;
            let mut out = create(&args.out)?;
            table.write_csv(&mut out).and_then(|_| out.flush()).map_err(io)?;
        }
        Experiment::Rice => {
            let mut rng = ChaCha20Rng::seed_from_u64(args.seed);
            let filters: Vec<Vec<f64>> = (0..10)
                .map(|i| {
                    let rho1 = -0.9 + 1.8 * (i as f64 + 0.5) / 10.0;
                    let problem = SsaProblem::from_predictor(random_filter(12, &mut rng))?;
                    Ok(ssa::solve(&problem, &SsaConfig::rho(rho1))?.b)
                })
                .collect::<Result<_>>()?;
            let rows: Vec<(f64, f64, f64)> = with_thread_cap(|| {
                filters
                    .par_iter()
                    .enumerate()
                    .map(|(i, b)| {
                        let x = generate(&SeriesKind::Gaussian, args.n, args.seed.wrapping_add(1 + i as u64))?;
                        let rho = acf1(b);
                        Ok((rho, ht_from_rho(rho)?, empirical_holding_time(&apply_filter(b, &x)?)?))
                    })
                    .collect::<ssa_core::Result<_>>()
            })?;
            let mut out = create(&args.out)?;
            writeln!(out, "filter,rho1,theoretical_ht,empirical_ht,relative_deviation").map_err(io)?;
            for (i, (rho, t, e)) in rows.iter().enumerate() {
                writeln!(out, "{i},{rho},{t},{e},{}", (e - t) / t).map_err(io)?;
            }
            out.flush().map_err(io)?;
        }
        Experiment::Table1 => {
            let spec = TargetSpec::new(hp_two_sided(1600.0, 500)?, 0, 101);
            let problem = SsaProblem::from_target(&spec)?;
            let mse = ssa::Diagnostics::evaluate(&problem.gamma_delta, &problem);
            let mut out = create(&args.out)?;
            writeln!(out, "filter,target_correlation,sign_accuracy,acf1,holding_time,nu").map_err(io)?;
            writeln!(
                out,
                "mse,{},{},{},{},",
                mse.target_correlation, mse.sign_accuracy, mse.acf1, mse.holding_time
            )
            .map_err(io)?;
            for (name, s) in hp1600_designs()? {
                let g = s.diagnostics;
                writeln!(
                    out,
                    "{name},{},{},{},{},{}",
                    g.target_correlation,
                    g.sign_accuracy,
                    g.acf1,
                    g.holding_time,
                    s.nu.map(|v| v.to_string()).unwrap_or_default()
                )
                .map_err(io)?;
            }
            out.flush().map_err(io)?;
        }
    }
    Ok(vec![args.out.clone()])
}

pub use data::DatedSeries;
