//! Global-best particle swarm with constriction coefficients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BestTracker, CountedObjective};
use crate::domain::BoxDomain;
use crate::linalg::l2_dist;
use crate::run::{RunError, RunResult, Termination, TraceRecord};

#[derive(Debug, Clone)]
pub struct ParticleSwarmParams {
    /// Defaults to `min(10 * d, 100)` when unset.
    pub swarm_size: Option<usize>,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
}

impl Default for ParticleSwarmParams {
    fn default() -> Self {
        ParticleSwarmParams {
            swarm_size: None,
            inertia: 0.729,
            cognitive: 1.49445,
            social: 1.49445,
        }
    }
}

pub fn particle_swarm<F>(
    objective: F,
    domain: &BoxDomain,
    params: &ParticleSwarmParams,
    max_evaluations: usize,
    seed: u64,
) -> Result<RunResult, RunError>
where
    F: FnMut(&[f64]) -> f64,
{
    let d = domain.dimension();
    let swarm_size = params.swarm_size.unwrap_or_else(|| (10 * d).min(100)).max(1);
    let mut counted = CountedObjective::new(objective, max_evaluations);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let widths = domain.widths();

    let mut positions: Vec<Vec<f64>> = Vec::with_capacity(swarm_size);
    let mut velocities: Vec<Vec<f64>> = Vec::with_capacity(swarm_size);
    let mut personal_best: Vec<Vec<f64>> = Vec::with_capacity(swarm_size);
    let mut personal_value: Vec<f64> = Vec::with_capacity(swarm_size);
    let mut best: Option<BestTracker> = None;

    for _ in 0..swarm_size {
        let p = domain.sample_uniform(&mut rng);
        let q = match counted.eval(&p)? {
            Some(q) => q,
            None => break,
        };
        match &mut best {
            Some(b) => b.observe(&p, q),
            None => best = Some(BestTracker::new(p.clone(), q)),
        }
        positions.push(p.clone());
        velocities.push(vec![0.0; d]);
        personal_best.push(p);
        personal_value.push(q);
    }
    let mut best = match best {
        Some(b) => b,
        None => {
            return Err(RunError::InvalidConfig(
                "particle swarm needs a budget of at least 1".into(),
            ))
        }
    };

    let mut trace: Vec<TraceRecord> = Vec::new();
    let termination = 'outer: loop {
        if counted.exhausted() {
            break Termination::MaxEvaluations;
        }
        for i in 0..positions.len() {
            for k in 0..d {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let v = params.inertia * velocities[i][k]
                    + params.cognitive * r1 * (personal_best[i][k] - positions[i][k])
                    + params.social * r2 * (best.point[k] - positions[i][k]);
                velocities[i][k] = v.clamp(-widths[k], widths[k]);
            }
            for k in 0..d {
                positions[i][k] += velocities[i][k];
            }
            domain.clip(&mut positions[i]);
            let q = match counted.eval(&positions[i])? {
                Some(q) => q,
                None => break 'outer Termination::MaxEvaluations,
            };
            if q < personal_value[i] {
                personal_value[i] = q;
                personal_best[i] = positions[i].clone();
            }
            best.observe(&positions[i], q);
        }

        let spread = positions
            .iter()
            .map(|p| l2_dist(p, &best.point))
            .fold(0.0f64, f64::max);
        trace.push(TraceRecord {
            iteration: trace.len() + 1,
            archive_size: counted.evaluations,
            gamma: 0.0,
            eval_count: counted.evaluations,
            best_value: best.value,
            mean: best.point.clone(),
            cov_frobenius: spread,
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
