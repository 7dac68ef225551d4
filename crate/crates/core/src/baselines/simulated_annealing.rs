//! Simulated annealing with Metropolis acceptance and geometric cooling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{BestTracker, CountedObjective};
use crate::domain::BoxDomain;
use crate::run::{RunError, RunResult, Termination, TraceRecord};

#[derive(Debug, Clone)]
pub struct SimulatedAnnealingParams {
    /// Overrides the probe-based starting temperature when set.
    pub initial_temperature: Option<f64>,
    /// Number of uniform probe points used to set the starting temperature
    /// (their objective spread) and the starting point (their best).
    pub probes: usize,
    pub cooling: f64,
    pub moves_per_temperature: usize,
    /// Gaussian move scale at full temperature, as a fraction of box width;
    /// the scale shrinks proportionally to `T / T0`.
    pub move_fraction: f64,
}

impl Default for SimulatedAnnealingParams {
    fn default() -> Self {
        SimulatedAnnealingParams {
            initial_temperature: None,
            probes: 10,
            cooling: 0.95,
            moves_per_temperature: 20,
            move_fraction: 0.5,
        }
    }
}

pub fn simulated_annealing<F>(
    objective: F,
    domain: &BoxDomain,
    params: &SimulatedAnnealingParams,
    max_evaluations: usize,
    seed: u64,
) -> Result<RunResult, RunError>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut counted = CountedObjective::new(objective, max_evaluations);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let widths = domain.widths();

    // Probe phase: spread sets the temperature, best probe is the start.
    let mut current: Option<(Vec<f64>, f64)> = None;
    let mut spread_lo = f64::INFINITY;
    let mut spread_hi = f64::NEG_INFINITY;
    for _ in 0..params.probes.max(1) {
        let p = domain.sample_uniform(&mut rng);
        let q = match counted.eval(&p)? {
            Some(q) => q,
            None => break,
        };
        spread_lo = spread_lo.min(q);
        spread_hi = spread_hi.max(q);
        if current.as_ref().is_none_or(|(_, v)| q < *v) {
            current = Some((p, q));
        }
    }
    let (mut point, mut value) = match current {
        Some(c) => c,
        None => {
            return Err(RunError::InvalidConfig(
                "simulated annealing needs a budget of at least 1".into(),
            ))
        }
    };
    let mut best = BestTracker::new(point.clone(), value);

    let t0 = params
        .initial_temperature
        .unwrap_or_else(|| (spread_hi - spread_lo).max(1e-12));
    let mut temperature = t0;
    let mut moves = 0usize;
    let mut trace: Vec<TraceRecord> = Vec::new();
    let scale_base = t0.max(1e-12);

    let termination = loop {
        if counted.exhausted() {
            break Termination::MaxEvaluations;
        }
        // Scale floor keeps late-stage moves large enough to polish the
        // current basin instead of freezing in place.
        let ratio = (temperature / scale_base).clamp(0.002, 1.0);
        let mut proposal = point.clone();
        for (v, w) in proposal.iter_mut().zip(&widths) {
            let step: f64 = rng.sample(StandardNormal);
            *v += step * w * params.move_fraction * ratio;
        }
        domain.clip(&mut proposal);
        let q = match counted.eval(&proposal)? {
            Some(q) => q,
            None => break Termination::MaxEvaluations,
        };
        best.observe(&proposal, q);

        let delta = q - value;
        let accept = if delta <= 0.0 {
            true
        } else if temperature > 0.0 {
            rng.random::<f64>() < (-delta / temperature).exp()
        } else {
            false
        };
        if accept {
            point = proposal;
            value = q;
        }

        moves += 1;
        if moves.is_multiple_of(params.moves_per_temperature) {
            temperature *= params.cooling;
            trace.push(TraceRecord {
                iteration: trace.len() + 1,
                archive_size: counted.evaluations,
                gamma: temperature,
                eval_count: counted.evaluations,
                best_value: best.value,
                mean: point.clone(),
                cov_frobenius: ratio,
            });
        }
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
