//! Trial execution: one (function, method, seed) run and the full matrix.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use macopt::baselines::{
    nelder_mead, particle_swarm, pattern_search, simulated_annealing, NelderMeadParams,
    ParticleSwarmParams, PatternSearchParams, SimulatedAnnealingParams,
};
use macopt::benchfns::make_function;
use macopt::{mac_optimize, MacConfig, RunError, RunResult, TraceRecord};

use crate::{io_err, HarnessError};

/// Optimizers the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Mac,
    NelderMead,
    PatternSearch,
    SimulatedAnnealing,
    ParticleSwarm,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Mac,
        Method::NelderMead,
        Method::PatternSearch,
        Method::SimulatedAnnealing,
        Method::ParticleSwarm,
    ];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Mac => "mac",
            Method::NelderMead => "nelder_mead",
            Method::PatternSearch => "pattern_search",
            Method::SimulatedAnnealing => "simulated_annealing",
            Method::ParticleSwarm => "particle_swarm",
        };
        f.write_str(s)
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "mac" => Ok(Method::Mac),
            "nm" | "neldermead" | "simplex" => Ok(Method::NelderMead),
            "ps" | "patternsearch" => Ok(Method::PatternSearch),
            "sa" | "simulatedannealing" => Ok(Method::SimulatedAnnealing),
            "pso" | "particleswarm" => Ok(Method::ParticleSwarm),
            _ => Err(HarnessError::UnknownMethod(s.to_string())),
        }
    }
}

/// The full experiment grid: every listed function is run with every method
/// and every seed, each run capped at `budget` evaluations.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub functions: Vec<String>,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    pub budget: usize,
    pub output_dir: PathBuf,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.functions.is_empty() {
            return Err(HarnessError::InvalidPlan("no functions listed".into()));
        }
        if self.methods.is_empty() {
            return Err(HarnessError::InvalidPlan("no methods listed".into()));
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::InvalidPlan("no seeds listed".into()));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return Err(HarnessError::InvalidPlan("seeds must be distinct".into()));
        }
        for id in &self.functions {
            make_function(id).map_err(|e| HarnessError::InvalidPlan(e.to_string()))?;
        }
        Ok(())
    }
}

/// Outcome of a single optimizer run. Failed trials carry `NaN` as their
/// best value plus an error message instead of aborting the matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub function: String,
    pub method: Method,
    pub seed: u64,
    #[serde(with = "nan_as_null")]
    pub best_value: f64,
    pub evaluations: usize,
    pub wall_time_seconds: f64,
    pub termination: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub trace: Vec<TraceRecord>,
}

impl TrialRecord {
    pub fn failed(&self) -> bool {
        !self.best_value.is_finite()
    }
}

/// JSON has no NaN literal; non-finite best values round-trip through null.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            s.serialize_some(value)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// Runs one trial. Optimizer errors become failed records, not panics; wall
/// time covers the optimize call only.
pub fn run_trial(function_id: &str, method: Method, seed: u64, budget: usize) -> TrialRecord {
    let failed = |message: String, evaluations: usize, trace: Vec<TraceRecord>| TrialRecord {
        function: function_id.to_string(),
        method,
        seed,
        best_value: f64::NAN,
        evaluations,
        wall_time_seconds: 0.0,
        termination: "failed".to_string(),
        error: Some(message),
        trace,
    };

    let function = match make_function(function_id) {
        Ok(f) => f,
        Err(e) => return failed(e.to_string(), 0, Vec::new()),
    };
    if budget == 0 {
        return failed("budget must be at least 1".to_string(), 0, Vec::new());
    }

    let eval = function.evaluator();
    let objective = move |x: &[f64]| eval(x);
    let start = Instant::now();
    let outcome: Result<RunResult, RunError> = match method {
        Method::Mac => {
            let mut config = MacConfig::new(function.domain.clone());
            config.seed = seed;
            config.max_evaluations = budget;
            mac_optimize(&config, objective, None)
        }
        Method::NelderMead => nelder_mead(
            objective,
            &function.domain,
            &NelderMeadParams::default(),
            budget,
            seed,
        ),
        Method::PatternSearch => pattern_search(
            objective,
            &function.domain,
            &PatternSearchParams::default(),
            budget,
            seed,
        ),
        Method::SimulatedAnnealing => simulated_annealing(
            objective,
            &function.domain,
            &SimulatedAnnealingParams::default(),
            budget,
            seed,
        ),
        Method::ParticleSwarm => particle_swarm(
            objective,
            &function.domain,
            &ParticleSwarmParams::default(),
            budget,
            seed,
        ),
    };
    let wall_time_seconds = start.elapsed().as_secs_f64();

    match outcome {
        Ok(result) => TrialRecord {
            function: function_id.to_string(),
            method,
            seed,
            best_value: result.best_value,
            evaluations: result.evaluations,
            wall_time_seconds,
            termination: result.termination.to_string(),
            error: None,
            trace: result.trace,
        },
        Err(err) => {
            let trace = match &err {
                RunError::NonFiniteObjective { trace, .. } => trace.clone(),
                _ => Vec::new(),
            };
            let evaluations = trace.last().map_or(0, |t| t.eval_count);
            failed(err.to_string(), evaluations, trace)
        }
    }
}

/// Runs the whole grid, possibly across a worker pool. Records come back in
/// plan order (function, then method, then seed) regardless of how the work
/// was scheduled.
pub fn run_matrix(plan: &ExperimentPlan) -> Result<Vec<TrialRecord>, HarnessError> {
    run_matrix_with_progress(plan, |_| {})
}

/// [`run_matrix`] with a per-completed-trial callback (used for live logs).
pub fn run_matrix_with_progress<F>(
    plan: &ExperimentPlan,
    progress: F,
) -> Result<Vec<TrialRecord>, HarnessError>
where
    F: Fn(&TrialRecord) + Sync,
{
    plan.validate()?;
    let cells: Vec<(&str, Method, u64)> = plan
        .functions
        .iter()
        .flat_map(|f| {
            plan.methods.iter().flat_map(move |&m| {
                plan.seeds.iter().map(move |&s| (f.as_str(), m, s))
            })
        })
        .collect();
    let records: Vec<TrialRecord> = cells
        .par_iter()
        .map(|&(f, m, s)| {
            let record = run_trial(f, m, s, plan.budget);
            progress(&record);
            record
        })
        .collect();
    Ok(records)
}

pub fn write_trials_json(records: &[TrialRecord], path: &Path) -> Result<(), HarnessError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
    }
    let json = serde_json::to_string(records).map_err(|e| HarnessError::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    std::fs::write(path, json).map_err(|e| io_err(path, e))
}

pub fn read_trials_json(path: &Path) -> Result<Vec<TrialRecord>, HarnessError> {
    let raw = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&raw).map_err(|e| HarnessError::Json {
        path: path.to_path_buf(),
        source: e,
    })
}
