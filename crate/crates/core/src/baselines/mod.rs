//! Reference derivative-free optimizers the harness compares MAC against:
//! Nelder-Mead simplex, compass pattern search, simulated annealing, and
//! particle swarm optimization. All four honor the same budget and
//! [`RunResult`](crate::run::RunResult) contract as the MAC optimizer:
//! `max_evaluations` is never exceeded, results replay bit-identically for a
//! fixed seed, and returned points lie inside the box domain.
//!
//! These are textbook implementations with documented defaults, not ports of
//! any particular toolbox.

mod nelder_mead;
mod particle_swarm;
mod pattern_search;
mod simulated_annealing;

pub use nelder_mead::{nelder_mead, NelderMeadParams};
pub use particle_swarm::{particle_swarm, ParticleSwarmParams};
pub use pattern_search::{pattern_search, PatternSearchParams};
pub use simulated_annealing::{simulated_annealing, SimulatedAnnealingParams};

use crate::run::RunError;

/// Wraps an objective with evaluation counting, a hard budget, and the
/// non-finite-value guard shared by every baseline.
pub(crate) struct CountedObjective<F> {
    objective: F,
    pub evaluations: usize,
    pub max_evaluations: usize,
}

impl<F: FnMut(&[f64]) -> f64> CountedObjective<F> {
    pub fn new(objective: F, max_evaluations: usize) -> Self {
        CountedObjective {
            objective,
            evaluations: 0,
            max_evaluations,
        }
    }

    /// `Ok(None)` means the budget is exhausted; the caller must stop.
    pub fn eval(&mut self, x: &[f64]) -> Result<Option<f64>, RunError> {
        if self.evaluations >= self.max_evaluations {
            return Ok(None);
        }
        let value = (self.objective)(x);
        self.evaluations += 1;
        if !value.is_finite() {
            return Err(RunError::NonFiniteObjective {
                point: x.to_vec(),
                value,
                trace: Vec::new(),
            });
        }
        Ok(Some(value))
    }

    pub fn exhausted(&self) -> bool {
        self.evaluations >= self.max_evaluations
    }
}

/// Best-ever bookkeeping with first-encountered tie-breaking.
pub(crate) struct BestTracker {
    pub point: Vec<f64>,
    pub value: f64,
}

impl BestTracker {
    pub fn new(point: Vec<f64>, value: f64) -> Self {
        BestTracker { point, value }
    }

    pub fn observe(&mut self, point: &[f64], value: f64) {
        if value < self.value {
            self.value = value;
            self.point = point.to_vec();
        }
    }
}
