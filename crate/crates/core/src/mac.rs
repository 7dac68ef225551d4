//! The MAC optimizer: sample candidate points through an affine map of an
//! ambient distribution, weight them by a mass function of their objective
//! values, and replace the map's mean and covariance square root with the
//! weighted empirical ones. The weight sharpness and the archive size grow
//! every iteration, so the sampling distribution concentrates around the
//! best region seen so far.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::domain::BoxDomain;
use crate::linalg::{self, l2_dist, l2_norm, psd_sqrt, weighted_scatter, LinalgError, SymMatrix};
use crate::run::{RunError, RunResult, Termination, TraceRecord};

/// Covariance factor norms below this stop the run as collapsed.
const COLLAPSE_THRESHOLD: f64 = 1e-300;

/// Ambient (apriori) distribution the raw perturbations are drawn from.
///
/// `StandardNormal` and `UniformBallIdentity` have zero mean and identity
/// covariance. `TruncatedBall(t)` is uniform on `{x : ||x||^2 <= t}` with
/// `0 < t < 1/4`; its covariance is deliberately *not* the identity — it
/// exists so the contraction inequalities of the bounded-support convergence
/// analysis can be asserted on real runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmbientKind {
    StandardNormal,
    /// Uniform on the ball of radius `sqrt(d + 2)` (identity covariance).
    UniformBallIdentity,
    /// Uniform on the ball of squared radius `t`.
    TruncatedBall(f64),
}

/// Tuning parameters of a MAC run.
#[derive(Debug, Clone, PartialEq)]
pub struct MacConfig {
    pub domain: BoxDomain,
    /// Starting mean `u_0`; must lie inside the domain.
    pub initial_mean: Vec<f64>,
    /// Starting covariance factor `U_0`; must be symmetric positive definite.
    pub initial_factor: SymMatrix,
    pub ambient: AmbientKind,
    /// Batch growth factor `N`: iteration `n` adds `n * N` points.
    pub batch_growth: usize,
    pub gamma0: f64,
    pub gamma_factor: f64,
    /// Stop once the mean moves less than this (Euclidean norm) in one step.
    pub delta: f64,
    pub max_iterations: usize,
    pub max_evaluations: usize,
    pub seed: u64,
}

impl MacConfig {
    /// Defaults: mean at the origin projected into the box (the center for
    /// symmetric domains), factor `diag(width / 6)` so three standard-normal
    /// units span each half-box, `N = 4`, `gamma_0 = 0.001` growing by 2.8
    /// per iteration, `delta = 1e-6`, and safety caps of 100 iterations /
    /// 100,000 evaluations.
    pub fn new(domain: BoxDomain) -> Self {
        let mut initial_mean = vec![0.0; domain.dimension()];
        domain.clip(&mut initial_mean);
        let spread: Vec<f64> = domain.widths().iter().map(|w| w / 6.0).collect();
        let initial_factor = SymMatrix::from_diag(&spread);
        MacConfig {
            domain,
            initial_mean,
            initial_factor,
            ambient: AmbientKind::StandardNormal,
            batch_growth: 4,
            gamma0: 0.001,
            gamma_factor: 2.8,
            delta: 1e-6,
            max_iterations: 100,
            max_evaluations: 100_000,
            seed: 0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.domain.dimension()
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let d = self.dimension();
        if self.initial_mean.len() != d {
            return Err(RunError::InvalidConfig(format!(
                "initial mean has dimension {}, domain has {}",
                self.initial_mean.len(),
                d
            )));
        }
        if !self.initial_mean.iter().all(|v| v.is_finite()) {
            return Err(RunError::InvalidConfig("initial mean must be finite".into()));
        }
        if !self.domain.contains(&self.initial_mean) {
            return Err(RunError::InvalidConfig(
                "initial mean must lie inside the domain".into(),
            ));
        }
        if self.initial_factor.dim() != d {
            return Err(RunError::InvalidConfig(format!(
                "initial factor has dimension {}, domain has {}",
                self.initial_factor.dim(),
                d
            )));
        }
        let eig = linalg::sym_eig(&self.initial_factor)?;
        if eig.values.last().copied().unwrap_or(0.0) <= 0.0 {
            return Err(RunError::InvalidConfig(
                "initial factor must be positive definite".into(),
            ));
        }
        if self.batch_growth == 0 {
            return Err(RunError::InvalidConfig("batch growth must be at least 1".into()));
        }
        if !(self.gamma0 > 0.0 && self.gamma0.is_finite()) {
            return Err(RunError::InvalidConfig("gamma0 must be positive".into()));
        }
        if !(self.gamma_factor > 1.0 && self.gamma_factor.is_finite()) {
            return Err(RunError::InvalidConfig("gamma factor must exceed 1".into()));
        }
        // NaN fails this check too.
        if self.delta.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(RunError::InvalidConfig("delta must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(RunError::InvalidConfig("max iterations must be at least 1".into()));
        }
        if self.max_evaluations == 0 {
            return Err(RunError::InvalidConfig("max evaluations must be at least 1".into()));
        }
        if let AmbientKind::TruncatedBall(t) = self.ambient {
            if !(t > 0.0 && t < 0.25) {
                return Err(RunError::InvalidConfig(format!(
                    "truncated ball support must satisfy 0 < t < 1/4, got {t}"
                )));
            }
        }
        Ok(())
    }
}

/// The evolving optimizer state: iteration counter, current affine map
/// `(u_n, U_n)`, the full sample archive, and best-so-far bookkeeping.
#[derive(Debug, Clone)]
pub struct MacState {
    pub iteration: usize,
    pub mean: Vec<f64>,
    pub cov_factor: SymMatrix,
    pub archive_points: Vec<Vec<f64>>,
    pub archive_values: Vec<f64>,
    pub gamma: f64,
    pub alpha: usize,
    pub eval_count: usize,
    pub best_point: Vec<f64>,
    pub best_value: f64,
    /// Frozen objective-value spread from the first iteration's archive;
    /// 0 until measured. Divides the sharpness schedule so the weights are
    /// invariant to the objective's units.
    pub value_scale: f64,
    /// Effective sample size of the most recent weight vector.
    pub weight_ess: f64,
}

impl MacState {
    /// Draws the single starting sample `p_1 = u_0 + U_0 xi` (the archive at
    /// iteration 0 has `alpha_0 = 1` entry) and evaluates it.
    pub fn init<F, R>(config: &MacConfig, objective: &mut F, rng: &mut R) -> Result<Self, RunError>
    where
        F: FnMut(&[f64]) -> f64,
        R: Rng,
    {
        let d = config.dimension();
        let xi = sample_ambient(config.ambient, d, 1, rng);
        let points = propose_points(
            &config.initial_mean,
            &config.initial_factor,
            &xi,
            &config.domain,
        )?;
        let p = points.into_iter().next().expect("one sample requested");
        let q = objective(&p);
        if !q.is_finite() {
            return Err(RunError::NonFiniteObjective {
                point: p,
                value: q,
                trace: Vec::new(),
            });
        }
        Ok(MacState {
            iteration: 0,
            mean: config.initial_mean.clone(),
            cov_factor: config.initial_factor.clone(),
            archive_points: vec![p.clone()],
            archive_values: vec![q],
            gamma: config.gamma0,
            alpha: 1,
            eval_count: 1,
            best_point: p,
            best_value: q,
            value_scale: 0.0,
            weight_ess: 1.0,
        })
    }
}

/// Mass (penalty) function `g(gamma, q) = exp(-gamma * q)`.
///
/// Values can exceed 1 when `q < 0`; callers that must stay bounded work with
/// normalized ratios (see [`compute_weights`]).
pub fn mass(gamma: f64, q: f64) -> f64 {
    (-gamma * q).exp()
}

/// Normalized mass weights `g(gamma, q_i) / sum_j g(gamma, q_j)`.
///
/// Computed with the max-shift trick, `exp(-gamma * (q_i - q_min))`, which is
/// algebraically identical to the direct ratio but immune to overflow for
/// large `gamma`.
pub fn compute_weights(gamma: f64, q_values: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if q_values.is_empty() {
        return Err(LinalgError::Empty);
    }
    debug_assert!(q_values.iter().all(|q| q.is_finite()));
    let q_min = q_values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut weights: Vec<f64> = q_values
        .iter()
        .map(|&q| (-gamma * (q - q_min)).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok(weights)
}

/// Cumulative sample count `alpha_n`: `alpha_0 = 1`,
/// `alpha_n = alpha_{n-1} + n * N`.
pub fn alpha_schedule(n: usize, batch_growth: usize) -> usize {
    1 + batch_growth * n * (n + 1) / 2
}

/// Robust spread (lower median minus minimum) of a value set, used to make
/// the weight sharpness dimensionless. The gamma schedule anneals the weight
/// discrimination granularity by a fixed factor per iteration; dividing gamma
/// by the spread of the *first* batch pins that granularity to the
/// objective's own units, so the same schedule works identically on
/// objectives ranging over 1e-4 or 1e10. The scale is measured once and then
/// frozen: re-measuring it on the concentrating archive would shrink it in
/// lockstep and freeze the search. Falls back to the full range, then to 1,
/// when degenerate.
pub fn value_scale(q_values: &[f64]) -> f64 {
    if q_values.is_empty() {
        return 1.0;
    }
    let mut sorted = q_values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite objective values"));
    let min = sorted[0];
    let median = sorted[(sorted.len() - 1) / 2];
    let spread = median - min;
    if spread > 0.0 {
        return spread;
    }
    let range = sorted[sorted.len() - 1] - min;
    if range > 0.0 {
        return range;
    }
    1.0
}

/// Weight sharpness `gamma_n = gamma_0 * factor^n`.
pub fn gamma_schedule(n: usize, gamma0: f64, factor: f64) -> f64 {
    gamma0 * factor.powi(n as i32)
}

/// Minimum effective sample size the weights are allowed to concentrate to.
/// Mean and covariance estimates from fewer points than this are too noisy
/// in `d` dimensions and freeze the search off-center.
fn ess_floor(dimension: usize) -> f64 {
    6.0 * dimension as f64
}

/// Effective sample size `1 / sum(w^2)` of a normalized weight vector.
fn effective_sample_size(weights: &[f64]) -> f64 {
    1.0 / weights.iter().map(|w| w * w).sum::<f64>()
}

/// Mass weights at sharpness `gamma`, tempered so the effective sample size
/// stays at or above `floor` (when the archive is big enough to allow it).
/// The sharpness actually applied is the largest value in `[0, gamma]`
/// compatible with the floor, found by bisection; the schedule still caps
/// the pace, the floor only delays concentration the archive cannot
/// statistically support yet.
pub(crate) fn tempered_weights(
    gamma: f64,
    q_values: &[f64],
    floor: f64,
) -> Result<Vec<f64>, LinalgError> {
    // While the archive is smaller than the floor the weights stay uniform;
    // concentrating onto a couple of early lucky samples teleports the mean
    // onto their transverse noise, which in high dimensions is further from
    // the optimum than the starting point.
    if (q_values.len() as f64) < floor {
        return compute_weights(0.0, q_values);
    }
    let weights = compute_weights(gamma, q_values)?;
    let target = floor;
    if effective_sample_size(&weights) >= target || gamma <= 0.0 {
        return Ok(weights);
    }
    let mut lo = 0.0f64;
    let mut hi = gamma;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let w = compute_weights(mid, q_values)?;
        if effective_sample_size(&w) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    compute_weights(lo, q_values)
}

/// Draws `count` independent samples from the ambient distribution.
pub fn sample_ambient<R: Rng>(
    kind: AmbientKind,
    dim: usize,
    count: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| match kind {
            AmbientKind::StandardNormal => {
                (0..dim).map(|_| rng.sample(StandardNormal)).collect()
            }
            AmbientKind::UniformBallIdentity => {
                uniform_ball(rng, dim, ((dim + 2) as f64).sqrt(), None)
            }
            AmbientKind::TruncatedBall(t) => uniform_ball(rng, dim, t.sqrt(), Some(t)),
        })
        .collect()
}

/// Uniform point in the ball of the given radius: isotropic direction from a
/// normalized Gaussian, radius scaled by `u^(1/d)`. With `sq_cap` set, the
/// squared norm is forced to stay at or below the cap even under floating
/// point round-off.
fn uniform_ball<R: Rng>(rng: &mut R, dim: usize, radius: f64, sq_cap: Option<f64>) -> Vec<f64> {
    loop {
        let gauss: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = l2_norm(&gauss);
        if norm < 1e-12 {
            continue;
        }
        let u: f64 = rng.random();
        let r = radius * u.powf(1.0 / dim as f64);
        let mut point: Vec<f64> = gauss.iter().map(|g| g * r / norm).collect();
        if let Some(cap) = sq_cap {
            let mut sq: f64 = point.iter().map(|v| v * v).sum();
            while sq > cap {
                for v in &mut point {
                    *v *= 1.0 - 1e-15;
                }
                sq = point.iter().map(|v| v * v).sum();
            }
        }
        return point;
    }
}

/// Maps raw perturbations through the current affine transform and projects
/// the results into the domain: `p = clip(u + U * xi)`.
pub fn propose_points(
    mean: &[f64],
    factor: &SymMatrix,
    perturbations: &[Vec<f64>],
    domain: &BoxDomain,
) -> Result<Vec<Vec<f64>>, LinalgError> {
    if mean.len() != factor.dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: factor.dim(),
            got: mean.len(),
        });
    }
    perturbations
        .iter()
        .map(|xi| {
            let mut p = factor.mat_vec(xi)?;
            for (v, m) in p.iter_mut().zip(mean) {
                *v += m;
            }
            domain.clip(&mut p);
            Ok(p)
        })
        .collect()
}

/// Weighted empirical mean `sum_i w_i p_i`.
pub fn weighted_mean(points: &[Vec<f64>], weights: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if points.is_empty() {
        return Err(LinalgError::Empty);
    }
    if points.len() != weights.len() {
        return Err(LinalgError::DimensionMismatch {
            expected: points.len(),
            got: weights.len(),
        });
    }
    let d = points[0].len();
    let mut out = vec![0.0; d];
    for (p, &w) in points.iter().zip(weights) {
        if p.len() != d {
            return Err(LinalgError::DimensionMismatch {
                expected: d,
                got: p.len(),
            });
        }
        for (o, v) in out.iter_mut().zip(p) {
            *o += w * v;
        }
    }
    Ok(out)
}

/// Square root of the weighted empirical covariance around `mean`.
pub fn weighted_cov_sqrt(
    points: &[Vec<f64>],
    weights: &[f64],
    mean: &[f64],
) -> Result<SymMatrix, LinalgError> {
    let scatter = weighted_scatter(points, weights, mean)?;
    psd_sqrt(&scatter)
}

/// One MAC iteration: sample the new batch through the current affine map,
/// evaluate it, then recompute weights over the full archive with the new
/// sharpness and replace the mean and covariance factor.
///
/// On a non-finite objective value the state is left untouched and the error
/// carries the offending point.
pub fn mac_step<F, R>(
    state: &mut MacState,
    config: &MacConfig,
    objective: &mut F,
    rng: &mut R,
) -> Result<(), RunError>
where
    F: FnMut(&[f64]) -> f64,
    R: Rng,
{
    let n = state.iteration + 1;
    let gamma_n = gamma_schedule(n, config.gamma0, config.gamma_factor);
    let alpha_n = alpha_schedule(n, config.batch_growth);
    let batch = alpha_n - state.alpha;

    // Mirrored pairs: each draw is used as +xi and -xi. The pair symmetry
    // cancels the batch's contribution to weighted-mean noise, which
    // otherwise keeps knocking the sampling center off the optimum in
    // higher dimensions.
    let half = sample_ambient(config.ambient, config.dimension(), batch.div_ceil(2), rng);
    let mut xis = Vec::with_capacity(batch);
    for xi in half {
        if xis.len() < batch {
            xis.push(xi.iter().map(|v| -v).collect());
        }
        if xis.len() < batch {
            xis.push(xi);
        }
    }
    let new_points = propose_points(&state.mean, &state.cov_factor, &xis, &config.domain)?;
    let mut new_values = Vec::with_capacity(batch);
    for p in &new_points {
        let q = objective(p);
        if !q.is_finite() {
            return Err(RunError::NonFiniteObjective {
                point: p.clone(),
                value: q,
                trace: Vec::new(),
            });
        }
        new_values.push(q);
    }

    for (p, &q) in new_points.iter().zip(&new_values) {
        // First encountered wins on ties: strict improvement only.
        if q < state.best_value {
            state.best_value = q;
            state.best_point = p.clone();
        }
    }
    state.archive_points.extend(new_points);
    state.archive_values.extend(new_values);
    state.eval_count += batch;

    if state.value_scale <= 0.0 {
        state.value_scale = value_scale(&state.archive_values);
    }
    let effective_gamma = (gamma_n / state.value_scale).min(1e300);
    let weights = tempered_weights(
        effective_gamma,
        &state.archive_values,
        ess_floor(config.dimension()),
    )?;
    state.weight_ess = effective_sample_size(&weights);
    let mean = weighted_mean(&state.archive_points, &weights)?;
    let factor = weighted_cov_sqrt(&state.archive_points, &weights, &mean)?;

    state.iteration = n;
    state.gamma = gamma_n;
    state.alpha = alpha_n;
    state.mean = mean;
    state.cov_factor = factor;
    Ok(())
}

/// Runs the full MAC loop until the mean settles (`delta`), the iteration or
/// evaluation budget runs out, or the covariance factor collapses.
///
/// Returns the best point ever evaluated (not the final mean). Identical
/// `(config, seed)` pairs produce bit-identical results; the generator is
/// ChaCha8 seeded directly from `config.seed`.
pub fn mac_optimize<F>(
    config: &MacConfig,
    mut objective: F,
    mut progress: Option<&mut dyn FnMut(&TraceRecord)>,
) -> Result<RunResult, RunError>
where
    F: FnMut(&[f64]) -> f64,
{
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut trace: Vec<TraceRecord> = Vec::new();

    let attach_trace = |err: RunError, trace: Vec<TraceRecord>| match err {
        RunError::NonFiniteObjective { point, value, .. } => {
            RunError::NonFiniteObjective { point, value, trace }
        }
        other => other,
    };

    let mut state = match MacState::init(config, &mut objective, &mut rng) {
        Ok(s) => s,
        Err(err) => return Err(attach_trace(err, trace)),
    };
    let mut prev_mean = state.mean.clone();

    let termination = loop {
        if state.iteration >= config.max_iterations {
            break Termination::MaxIterations;
        }
        let next_alpha = alpha_schedule(state.iteration + 1, config.batch_growth);
        let next_batch = next_alpha - state.alpha;
        if state.eval_count + next_batch > config.max_evaluations {
            break Termination::MaxEvaluations;
        }

        if let Err(err) = mac_step(&mut state, config, &mut objective, &mut rng) {
            return Err(attach_trace(err, trace));
        }

        let record = TraceRecord {
            iteration: state.iteration,
            archive_size: state.alpha,
            gamma: state.gamma,
            eval_count: state.eval_count,
            best_value: state.best_value,
            mean: state.mean.clone(),
            cov_frobenius: state.cov_factor.frobenius_norm(),
        };
        if let Some(sink) = progress.as_deref_mut() {
            sink(&record);
        }
        trace.push(record);

        // A finite delta is only meaningful once the weights discriminate;
        // while they are still near-uniform the mirrored batches cancel and
        // the mean barely moves by construction. An infinite delta is
        // satisfied by any displacement.
        let delta_armed = config.delta.is_infinite()
            || state.weight_ess <= 0.95 * state.alpha as f64;
        if delta_armed && l2_dist(&state.mean, &prev_mean) < config.delta {
            break Termination::DeltaConverged;
        }
        if state.cov_factor.frobenius_norm() < COLLAPSE_THRESHOLD {
            break Termination::CovarianceCollapsed;
        }
        prev_mean.clone_from(&state.mean);
    };

    Ok(RunResult {
        best_point: state.best_point,
        best_value: state.best_value,
        iterations: state.iteration,
        evaluations: state.eval_count,
        termination,
        trace,
    })
}
