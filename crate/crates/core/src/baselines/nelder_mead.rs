//! Nelder-Mead downhill simplex with box clipping.

use super::{BestTracker, CountedObjective};
use crate::domain::BoxDomain;
use crate::linalg::l2_dist;
use crate::run::{RunError, RunResult, Termination, TraceRecord};

/// Standard simplex coefficients; the starting simplex sits at the domain
/// center with one vertex offset per axis.
#[derive(Debug, Clone)]
pub struct NelderMeadParams {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Initial vertex offset as a fraction of the box width per axis.
    pub initial_offset: f64,
}

impl Default for NelderMeadParams {
    fn default() -> Self {
        NelderMeadParams {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_offset: 0.05,
        }
    }
}

/// Minimizes `objective` over `domain`. The seed is unused (the method is
/// deterministic) but kept for signature parity with the other baselines.
pub fn nelder_mead<F>(
    objective: F,
    domain: &BoxDomain,
    params: &NelderMeadParams,
    max_evaluations: usize,
    _seed: u64,
) -> Result<RunResult, RunError>
where
    F: FnMut(&[f64]) -> f64,
{
    let d = domain.dimension();
    let mut counted = CountedObjective::new(objective, max_evaluations);
    let widths = domain.widths();

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    simplex.push(domain.center());
    for k in 0..d {
        let mut v = domain.center();
        v[k] += params.initial_offset * widths[k];
        domain.clip(&mut v);
        simplex.push(v);
    }

    let mut values = Vec::with_capacity(d + 1);
    let mut best: Option<BestTracker> = None;
    for v in &simplex {
        match counted.eval(v)? {
            Some(q) => {
                match &mut best {
                    Some(b) => b.observe(v, q),
                    None => best = Some(BestTracker::new(v.clone(), q)),
                }
                values.push(q);
            }
            None => {
                // Budget died during initialization; report what we have.
                let b = best.expect("budget of at least 1 evaluates one vertex");
                return Ok(finish(b, counted.evaluations, Termination::MaxEvaluations, vec![]));
            }
        }
    }
    let mut best = best.expect("simplex is non-empty");
    let mut trace: Vec<TraceRecord> = Vec::new();

    let termination = 'outer: loop {
        // Order vertices best-to-worst; stable sort keeps replays identical.
        let mut idx: Vec<usize> = (0..=d).collect();
        idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        values = idx.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..]
            .iter()
            .map(|v| l2_dist(v, &simplex[0]))
            .fold(0.0f64, f64::max);
        trace.push(TraceRecord {
            iteration: trace.len() + 1,
            archive_size: counted.evaluations,
            gamma: 0.0,
            eval_count: counted.evaluations,
            best_value: best.value,
            mean: simplex[0].clone(),
            cov_frobenius: diameter,
        });

        let spread = values[d] - values[0];
        if spread <= 1e-14 * (1.0 + values[0].abs()) && diameter <= 1e-12 {
            break Termination::DeltaConverged;
        }
        if counted.exhausted() {
            break Termination::MaxEvaluations;
        }

        let mut centroid = vec![0.0; d];
        for v in &simplex[..d] {
            for k in 0..d {
                centroid[k] += v[k] / d as f64;
            }
        }

        let blend = |from: &[f64], coeff: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(from)
                .map(|(c, w)| c + coeff * (c - w))
                .collect();
            domain.clip(&mut p);
            p
        };

        macro_rules! eval_or_stop {
            ($point:expr) => {
                match counted.eval($point)? {
                    Some(q) => {
                        best.observe($point, q);
                        q
                    }
                    None => break 'outer Termination::MaxEvaluations,
                }
            };
        }

        let reflected = blend(&simplex[d], params.reflection);
        let f_reflected = eval_or_stop!(&reflected);

        if f_reflected < values[0] {
            let expanded = blend(&simplex[d], params.reflection * params.expansion);
            let f_expanded = eval_or_stop!(&expanded);
            if f_expanded < f_reflected {
                simplex[d] = expanded;
                values[d] = f_expanded;
            } else {
                simplex[d] = reflected;
                values[d] = f_reflected;
            }
        } else if f_reflected < values[d - 1] {
            simplex[d] = reflected;
            values[d] = f_reflected;
        } else {
            let (contracted, f_contracted) = if f_reflected < values[d] {
                let p = blend(&simplex[d], params.reflection * params.contraction);
                let q = eval_or_stop!(&p);
                (p, q)
            } else {
                let p = blend(&simplex[d], -params.contraction);
                let q = eval_or_stop!(&p);
                (p, q)
            };
            if f_contracted < values[d].min(f_reflected) {
                simplex[d] = contracted;
                values[d] = f_contracted;
            } else {
                // Shrink toward the best vertex.
                let anchor = simplex[0].clone();
                for i in 1..=d {
                    for (v, a) in simplex[i].iter_mut().zip(&anchor) {
                        *v = a + params.shrink * (*v - a);
                    }
                    domain.clip(&mut simplex[i]);
                    let p = simplex[i].clone();
                    values[i] = eval_or_stop!(&p);
                }
            }
        }
    };

    Ok(finish(best, counted.evaluations, termination, trace))
}

fn finish(
    best: BestTracker,
    evaluations: usize,
    termination: Termination,
    trace: Vec<TraceRecord>,
) -> RunResult {
    RunResult {
        best_point: best.point,
        best_value: best.value,
        iterations: trace.len(),
        evaluations,
        termination,
        trace,
    }
}
