//! Compass pattern search: axis polling with step doubling and halving.

use super::{BestTracker, CountedObjective};
use crate::domain::BoxDomain;
use crate::run::{RunError, RunResult, Termination, TraceRecord};

#[derive(Debug, Clone)]
pub struct PatternSearchParams {
    /// Initial (and maximum) step as a fraction of the box width per axis.
    pub initial_step_fraction: f64,
    pub expand: f64,
    pub shrink: f64,
    /// Poll steps below this stop the search.
    pub min_step: f64,
}

impl Default for PatternSearchParams {
    fn default() -> Self {
        PatternSearchParams {
            initial_step_fraction: 0.25,
            expand: 2.0,
            shrink: 0.5,
            min_step: 1e-8,
        }
    }
}

/// Minimizes `objective` over `domain` starting at the center. The seed is
/// unused (polling is deterministic) but kept for signature parity.
pub fn pattern_search<F>(
    objective: F,
    domain: &BoxDomain,
    params: &PatternSearchParams,
    max_evaluations: usize,
    _seed: u64,
) -> Result<RunResult, RunError>
where
    F: FnMut(&[f64]) -> f64,
{
    let d = domain.dimension();
    let mut counted = CountedObjective::new(objective, max_evaluations);
    let caps: Vec<f64> = domain
        .widths()
        .iter()
        .map(|w| w * params.initial_step_fraction)
        .collect();
    let mut steps = caps.clone();

    let incumbent = domain.center();
    let value = match counted.eval(&incumbent)? {
        Some(q) => q,
        None => {
            return Err(RunError::InvalidConfig(
                "pattern search needs a budget of at least 1".into(),
            ))
        }
    };
    let mut incumbent = incumbent;
    let mut value = value;
    let mut best = BestTracker::new(incumbent.clone(), value);
    let mut trace: Vec<TraceRecord> = Vec::new();

    let termination = 'outer: loop {
        if steps.iter().all(|s| *s < params.min_step) {
            break Termination::DeltaConverged;
        }
        if counted.exhausted() {
            break Termination::MaxEvaluations;
        }

        // Poll +-step along every axis; take the best strict improvement.
        let mut improved: Option<(Vec<f64>, f64)> = None;
        for axis in 0..d {
            for sign in [1.0, -1.0] {
                let mut p = incumbent.clone();
                p[axis] += sign * steps[axis];
                domain.clip(&mut p);
                let q = match counted.eval(&p)? {
                    Some(q) => q,
                    None => break 'outer Termination::MaxEvaluations,
                };
                best.observe(&p, q);
                let current_best = improved.as_ref().map_or(value, |(_, v)| *v);
                if q < current_best {
                    improved = Some((p, q));
                }
            }
        }

        match improved {
            Some((p, q)) => {
                incumbent = p;
                value = q;
                for (s, cap) in steps.iter_mut().zip(&caps) {
                    *s = (*s * params.expand).min(*cap);
                }
            }
            None => {
                for s in &mut steps {
                    *s *= params.shrink;
                }
            }
        }

        trace.push(TraceRecord {
            iteration: trace.len() + 1,
            archive_size: counted.evaluations,
            gamma: 0.0,
            eval_count: counted.evaluations,
            best_value: best.value,
            mean: incumbent.clone(),
            cov_frobenius: steps.iter().cloned().fold(0.0f64, f64::max),
        });
    };

    Ok(RunResult {
        best_point: best.point,
        best_value: best.value,
        iterations: trace.len(),
        evaluations: counted.evaluations,
        termination,
        trace,
    })
}
