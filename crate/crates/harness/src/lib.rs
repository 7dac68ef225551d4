//! Benchmark harness: runs (function x method x seed) trial matrices over
//! the optimizer catalog, aggregates best values and evaluation counts,
//! persists CSV/JSON results, and renders convergence plots.

mod plot;
mod summary;
mod trial;

pub use plot::render_convergence_plot;
pub use summary::{aggregate, read_summary_csv, write_summary_csv, SummaryRow};
pub use trial::{
    read_trials_json, run_matrix, run_matrix_with_progress, run_trial, write_trials_json,
    ExperimentPlan, Method, TrialRecord,
};

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),
    #[error("unknown method '{0}'; valid: mac, nelder-mead, pattern-search, simulated-annealing, pso")]
    UnknownMethod(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

pub(crate) fn io_err(path: &std::path::Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}
