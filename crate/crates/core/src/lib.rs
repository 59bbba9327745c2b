//! Holding-time constrained filter design.
//!
//! Given a target filter and a forecast horizon, the solvers here find the
//! causal filter of length `L` with maximal target correlation among all
//! filters whose output changes sign at a prescribed average rate. The rate is
//! set through the lag-one autocorrelation `ρ_1` or, equivalently, the
//! holding time `π / arccos ρ_1`.
//!
//! * [`ssa`]: white-noise solver, boundary and completed cases, conversions.
//! * [`stationary`]: ARMA-driven data via innovation-space solves.
//! * [`integrated`]: I(1) and I(2) data under cointegration constraints.
//! * [`targets`]: Hodrick-Prescott and Baxter-King targets.
//! * [`empirics`]: simulation and sample diagnostics.

pub mod empirics;
pub mod error;
pub mod integrated;
pub mod io;
pub mod linalg;
pub mod series;
pub mod spectral;
pub mod ssa;
pub mod stationary;
pub mod targets;

pub use error::{Result, SsaError};
pub use integrated::{IntegratedConfig, IntegratedSolution};
pub use spectral::{eigenpairs, SpectralBasis, SpectralWeights};
pub use ssa::{Branch, Constraint, Diagnostics, SolutionKind, SsaConfig, SsaProblem, SsaSolution};
pub use stationary::{DependentSolution, ProcessModel};
pub use targets::{TargetFilter, TargetSpec};
