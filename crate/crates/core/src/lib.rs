//! Derivative-free stochastic global optimization built around the MAC
//! method: candidate points are drawn through an affine map of a fixed
//! ambient distribution, weighted by `exp(-gamma * Q)` of their objective
//! values, and the map's mean and covariance square root are replaced by the
//! weighted empirical ones while the sample archive and the weight sharpness
//! grow each iteration.
//!
//! The crate also ships the benchmark-function catalog the method is
//! exercised on (`benchfns`), four textbook comparison optimizers
//! (`baselines`), and the small dense linear-algebra kernel everything rests
//! on (`linalg`).
//!
//! ```
//! use macopt::{mac_optimize, BoxDomain, MacConfig};
//!
//! let domain = BoxDomain::symmetric(5.12, 2).unwrap();
//! let mut config = MacConfig::new(domain);
//! config.seed = 1;
//! config.max_evaluations = 2000;
//! let result = mac_optimize(&config, |x| x.iter().map(|v| v * v).sum(), None).unwrap();
//! assert!(result.best_value < 1e-2);
//! ```

pub mod baselines;
pub mod benchfns;
pub mod domain;
pub mod linalg;
pub mod mac;
pub mod run;

pub use domain::{BoxDomain, DomainError};
pub use mac::{
    alpha_schedule, compute_weights, gamma_schedule, mac_optimize, mac_step, mass,
    propose_points, sample_ambient, weighted_cov_sqrt, weighted_mean, AmbientKind, MacConfig,
    MacState,
};
pub use run::{RunError, RunResult, Termination, TraceRecord};
