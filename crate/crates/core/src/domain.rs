//! Box-constrained search region: per-coordinate lower/upper bounds.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("domain must have at least one coordinate")]
    Empty,
    #[error("bounds length mismatch: {lower} lower vs {upper} upper")]
    LengthMismatch { lower: usize, upper: usize },
    #[error("coordinate {index}: lower bound {lower} must be below upper bound {upper}")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },
}

/// Convex compact search region `[lower_0, upper_0] x ... x [lower_{d-1}, upper_{d-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, DomainError> {
        if lower.is_empty() {
            return Err(DomainError::Empty);
        }
        if lower.len() != upper.len() {
            return Err(DomainError::LengthMismatch {
                lower: lower.len(),
                upper: upper.len(),
            });
        }
        for (k, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(DomainError::InvalidBounds {
                    index: k,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(BoxDomain { lower, upper })
    }

    /// Cube `[-bound, bound]^d`.
    pub fn symmetric(bound: f64, dim: usize) -> Result<Self, DomainError> {
        Self::new(vec![-bound; dim], vec![bound; dim])
    }

    /// Cube `[lo, hi]^d`.
    pub fn cube(lo: f64, hi: f64, dim: usize) -> Result<Self, DomainError> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| 0.5 * (lo + hi))
            .collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    /// Componentwise projection onto the box, in place.
    pub fn clip(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*lo, *hi);
        }
    }

    /// A uniform random point inside the box.
    pub fn sample_uniform<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| rng.random_range(lo..=hi))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inverted_bounds() {
        assert!(matches!(
            BoxDomain::new(vec![1.0], vec![0.0]),
            Err(DomainError::InvalidBounds { .. })
        ));
    }

    #[test]
    fn clip_projects_componentwise() {
        let d = BoxDomain::symmetric(1.0, 2).unwrap();
        let mut x = vec![5.0, -0.2];
        d.clip(&mut x);
        assert_eq!(x, vec![1.0, -0.2]);
    }

    #[test]
    fn center_and_widths() {
        let d = BoxDomain::new(vec![-5.0, 0.0], vec![10.0, 1.0]).unwrap();
        assert_eq!(d.center(), vec![2.5, 0.5]);
        assert_eq!(d.widths(), vec![15.0, 1.0]);
    }
}
