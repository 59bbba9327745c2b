//! Shared fixtures for the solver benchmarks.

use ssa_core::targets::{hp_two_sided, TargetSpec};

pub fn hp_spec(lambda: f64, half_span: usize, len: usize) -> TargetSpec {
    TargetSpec::new(hp_two_sided(lambda, half_span).expect("valid HP target"), 0, len)
}
