//! Shared result and trace types honored by every optimizer in this crate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::LinalgError;

/// Why an optimizer run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Mean displacement fell below the configured tolerance.
    DeltaConverged,
    MaxIterations,
    MaxEvaluations,
    /// Covariance factor collapsed to numerical zero.
    CovarianceCollapsed,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Termination::DeltaConverged => "delta_converged",
            Termination::MaxIterations => "max_iterations",
            Termination::MaxEvaluations => "max_evaluations",
            Termination::CovarianceCollapsed => "covariance_collapsed",
        };
        f.write_str(s)
    }
}

/// One per-iteration snapshot. For the MAC optimizer the fields carry the
/// archive size, the weight sharpness, the current empirical mean, and the
/// Frobenius norm of the covariance factor; baselines fill the analogous
/// quantities (incumbent point, step/temperature scale).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub archive_size: usize,
    pub gamma: f64,
    pub eval_count: usize,
    pub best_value: f64,
    pub mean: Vec<f64>,
    pub cov_frobenius: f64,
}

/// Outcome of a full optimizer run: best point ever evaluated, bookkeeping
/// counters, and the per-iteration trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub termination: Termination,
    pub trace: Vec<TraceRecord>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// The objective produced NaN or an infinity. Carries the offending point
    /// and whatever trace had accumulated before becoming the abort.
    #[error("objective returned non-finite value {value} at {point:?}")]
    NonFiniteObjective {
        point: Vec<f64>,
        value: f64,
        trace: Vec<TraceRecord>,
    },
    #[error("numerical failure: {0}")]
    Numerical(#[from] LinalgError),
}
