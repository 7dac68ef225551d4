//! Minimal dense linear algebra for the covariance-factor update: symmetric
//! eigendecomposition (cyclic Jacobi), positive-semidefinite square root,
//! Frobenius norms, and weighted outer-product accumulation.
//!
//! Everything here targets small dense matrices (problem dimensions up to a
//! few dozen); no attempt is made at large-scale or sparse efficiency.

use thiserror::Error;

/// Maximum number of Jacobi sweeps before giving up.
const MAX_JACOBI_SWEEPS: usize = 100;

/// Off-diagonal norm threshold, relative to the Frobenius norm of the input.
const JACOBI_TOL: f64 = 1e-14;

/// Eigenvalues in `[-NEG_EIG_BAND * ||m||_F, 0)` are treated as round-off
/// zeros by [`psd_sqrt`]; anything below that band is a hard error.
const NEG_EIG_BAND: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix entry ({row},{col}) is not finite: {value}")]
    NonFinite { row: usize, col: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Jacobi eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue} below tolerance -{band}")]
    NotPositiveSemidefinite { eigenvalue: f64, band: f64 },
    #[error("weights must be nonnegative: weights[{index}] = {value}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weights must sum to 1 within 1e-12, got {sum}")]
    WeightSum { sum: f64 },
    #[error("empty input")]
    Empty,
}

/// Dense symmetric `d x d` matrix, stored row-major.
///
/// Construction symmetrizes the input as `(M + M^T) / 2` and rejects
/// non-finite entries, so a value of this type is always exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * m.dim + i] = v;
        }
        m
    }

    /// Builds a symmetric matrix from full rows, symmetrizing `(M + M^T)/2`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(LinalgError::Empty);
        }
        for row in rows {
            if row.len() != dim {
                return Err(LinalgError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
        }
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let v = 0.5 * (rows[i][j] + rows[j][i]);
                if !v.is_finite() {
                    return Err(LinalgError::NonFinite {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                data[i * dim + j] = v;
            }
        }
        Ok(SymMatrix { dim, data })
    }

    /// Wraps an already-symmetric buffer. Debug-asserts symmetry.
    fn from_raw(dim: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        SymMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Matrix-vector product `self * x`.
    pub fn mat_vec(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if x.len() != self.dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let out = self
            .data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect();
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Result of a symmetric eigendecomposition: `m = sum_k values[k] * v_k v_k^T`
/// with eigenvalues sorted in descending order and orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector paired with `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Converges when the off-diagonal norm drops below `1e-14 * ||m||_F`;
/// errors out after 100 sweeps.
pub fn sym_eig(m: &SymMatrix) -> Result<SymEig, LinalgError> {
    if !m.is_finite() {
        let (i, j, v) = first_non_finite(m);
        return Err(LinalgError::NonFinite {
            row: i,
            col: j,
            value: v,
        });
    }
    let n = m.dim;
    let mut a = m.data.clone();
    // v accumulates the rotations, row-major; column k is the k-th eigenvector.
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let threshold = JACOBI_TOL * m.frobenius_norm();

    let mut converged = n < 2 || off_diagonal_norm(&a, n) <= threshold;
    for _ in 0..MAX_JACOBI_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Rotation angle that annihilates a[p][q].
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        converged = off_diagonal_norm(&a, n) <= threshold;
    }
    if !converged {
        return Err(LinalgError::NoConvergence(MAX_JACOBI_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .partial_cmp(&a[i * n + i])
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&k| a[k * n + k]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| (0..n).map(|row| v[row * n + k]).collect())
        .collect();
    Ok(SymEig { values, vectors })
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            sum += a[i * n + j] * a[i * n + j];
        }
    }
    (2.0 * sum).sqrt()
}

fn first_non_finite(m: &SymMatrix) -> (usize, usize, f64) {
    for i in 0..m.dim {
        for j in 0..m.dim {
            if !m.get(i, j).is_finite() {
                return (i, j, m.get(i, j));
            }
        }
    }
    (0, 0, f64::NAN)
}

/// Positive-semidefinite square root via eigendecomposition.
///
/// Eigenvalues in the round-off band `[-1e-10 * ||m||_F, 0)` are clamped to
/// zero; anything below the band is rejected as not PSD.
pub fn psd_sqrt(m: &SymMatrix) -> Result<SymMatrix, LinalgError> {
    let eig = sym_eig(m)?;
    let band = NEG_EIG_BAND * m.frobenius_norm();
    let n = m.dim;
    let mut roots = Vec::with_capacity(n);
    for &lambda in &eig.values {
        if lambda < -band {
            return Err(LinalgError::NotPositiveSemidefinite {
                eigenvalue: lambda,
                band,
            });
        }
        roots.push(if lambda > 0.0 { lambda.sqrt() } else { 0.0 });
    }
    let mut data = vec![0.0; n * n];
    for (k, &r) in roots.iter().enumerate() {
        if r == 0.0 {
            continue;
        }
        let vk = &eig.vectors[k];
        for i in 0..n {
            let ri = r * vk[i];
            for j in 0..n {
                data[i * n + j] += ri * vk[j];
            }
        }
    }
    // Symmetrize to kill the last bits of accumulation asymmetry.
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (data[i * n + j] + data[j * n + i]);
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    Ok(SymMatrix::from_raw(n, data))
}

/// Weighted scatter `sum_i w_i (p_i - c)(p_i - c)^T`.
///
/// Weights must be nonnegative and sum to 1 within 1e-12.
pub fn weighted_scatter(
    points: &[Vec<f64>],
    weights: &[f64],
    center: &[f64],
) -> Result<SymMatrix, LinalgError> {
    if points.is_empty() {
        return Err(LinalgError::Empty);
    }
    if points.len() != weights.len() {
        return Err(LinalgError::DimensionMismatch {
            expected: points.len(),
            got: weights.len(),
        });
    }
    let d = center.len();
    let mut sum = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        if w < 0.0 {
            return Err(LinalgError::NegativeWeight { index: i, value: w });
        }
        sum += w;
    }
    if (sum - 1.0).abs() > 1e-12 {
        return Err(LinalgError::WeightSum { sum });
    }

    let mut data = vec![0.0; d * d];
    let mut diff = vec![0.0; d];
    for (p, &w) in points.iter().zip(weights) {
        if p.len() != d {
            return Err(LinalgError::DimensionMismatch {
                expected: d,
                got: p.len(),
            });
        }
        if w == 0.0 {
            continue;
        }
        for k in 0..d {
            diff[k] = p[k] - center[k];
        }
        for i in 0..d {
            let wdi = w * diff[i];
            for j in i..d {
                data[i * d + j] += wdi * diff[j];
            }
        }
    }
    // Mirror the upper triangle; the accumulation above is exactly symmetric.
    for i in 0..d {
        for j in i + 1..d {
            data[j * d + i] = data[i * d + j];
        }
    }
    Ok(SymMatrix::from_raw(d, data))
}

/// Euclidean norm of a vector.
pub fn l2_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Euclidean distance between two equal-length vectors.
pub fn l2_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(eig: &SymEig, n: usize) -> Vec<f64> {
        let mut data = vec![0.0; n * n];
        for (k, &lambda) in eig.values.iter().enumerate() {
            let vk = &eig.vectors[k];
            for i in 0..n {
                for j in 0..n {
                    data[i * n + j] += lambda * vk[i] * vk[j];
                }
            }
        }
        data
    }

    #[test]
    fn eig_identity() {
        let m = SymMatrix::identity(2);
        let eig = sym_eig(&m).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0]);
        // orthonormality
        let dot: f64 = eig.vectors[0].iter().zip(&eig.vectors[1]).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-12);
    }

    #[test]
    fn eig_analytic_2x2() {
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let eig = sym_eig(&m).unwrap();
        assert!((eig.values[0] - 3.0).abs() < 1e-12);
        assert!((eig.values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_diagonal_sorted_descending() {
        let m = SymMatrix::from_diag(&[5.0, -2.0, 0.0]);
        let eig = sym_eig(&m).unwrap();
        assert_eq!(eig.values, vec![5.0, 0.0, -2.0]);
    }

    #[test]
    fn eig_rejects_non_finite() {
        let m = SymMatrix::from_rows(&[vec![1.0, f64::NAN], vec![f64::NAN, 1.0]]);
        assert!(matches!(m, Err(LinalgError::NonFinite { .. })));
    }

    #[test]
    fn sqrt_diagonal() {
        let m = SymMatrix::from_diag(&[4.0, 9.0]);
        let r = psd_sqrt(&m).unwrap();
        assert!((r.get(0, 0) - 2.0).abs() < 1e-12);
        assert!((r.get(1, 1) - 3.0).abs() < 1e-12);
        assert!(r.get(0, 1).abs() < 1e-12);
    }

    #[test]
    fn sqrt_identity() {
        let m = SymMatrix::identity(3);
        let r = psd_sqrt(&m).unwrap();
        assert_eq!(r, SymMatrix::identity(3));
    }

    #[test]
    fn sqrt_clamps_round_off_negative() {
        let m = SymMatrix::from_diag(&[1.0, -1e-14]);
        let r = psd_sqrt(&m).unwrap();
        assert_eq!(r.get(1, 1), 0.0);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let m = SymMatrix::from_diag(&[1.0, -0.5]);
        assert!(matches!(
            psd_sqrt(&m),
            Err(LinalgError::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(SymMatrix::from_diag(&[3.0, 4.0]).frobenius_norm(), 5.0);
        assert_eq!(SymMatrix::zeros(4).frobenius_norm(), 0.0);
        let ones = SymMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(ones.frobenius_norm(), 2.0);
    }

    #[test]
    fn scatter_two_points_1d() {
        let m = weighted_scatter(&[vec![-1.0], vec![1.0]], &[0.5, 0.5], &[0.0]).unwrap();
        assert_eq!(m.get(0, 0), 1.0);
    }

    #[test]
    fn scatter_single_point_at_center() {
        let m = weighted_scatter(&[vec![2.0, 3.0]], &[1.0], &[2.0, 3.0]).unwrap();
        assert_eq!(m.frobenius_norm(), 0.0);
    }

    #[test]
    fn scatter_hand_computed() {
        // points {(0,0),(2,0),(0,2)}, weights {1/2,1/4,1/4}, center (1/2,1/2):
        // direct summation gives [[3/4, -1/4], [-1/4, 3/4]].
        let m = weighted_scatter(
            &[vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0]],
            &[0.5, 0.25, 0.25],
            &[0.5, 0.5],
        )
        .unwrap();
        assert!((m.get(0, 0) - 0.75).abs() < 1e-15);
        assert!((m.get(1, 1) - 0.75).abs() < 1e-15);
        assert!((m.get(0, 1) + 0.25).abs() < 1e-15);
    }

    #[test]
    fn scatter_rejects_bad_weights() {
        let pts = vec![vec![0.0], vec![1.0]];
        assert!(matches!(
            weighted_scatter(&pts, &[0.7, 0.7], &[0.0]),
            Err(LinalgError::WeightSum { .. })
        ));
        assert!(matches!(
            weighted_scatter(&pts, &[-0.1, 1.1], &[0.0]),
            Err(LinalgError::NegativeWeight { .. })
        ));
    }

    #[test]
    fn scatter_rejects_dimension_mismatch() {
        let pts = vec![vec![0.0, 1.0], vec![1.0]];
        assert!(matches!(
            weighted_scatter(&pts, &[0.5, 0.5], &[0.0, 0.0]),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[allow(clippy::needless_range_loop)]
    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn sym5() -> impl Strategy<Value = SymMatrix> {
            proptest::collection::vec(-10.0f64..10.0, 25).prop_map(|v| {
                let rows: Vec<Vec<f64>> = v.chunks(5).map(|c| c.to_vec()).collect();
                SymMatrix::from_rows(&rows).unwrap()
            })
        }

        proptest! {
            #[test]
            fn eig_reconstructs(m in sym5()) {
                let eig = sym_eig(&m).unwrap();
                let rec = reconstruct(&eig, 5);
                let mut err = 0.0f64;
                for i in 0..5 {
                    for j in 0..5 {
                        err += (rec[i * 5 + j] - m.get(i, j)).powi(2);
                    }
                }
                let err = err.sqrt();
                prop_assert!(err <= 1e-10 * (1.0 + m.frobenius_norm()));
            }

            #[test]
            fn eig_vectors_orthonormal(m in sym5()) {
                let eig = sym_eig(&m).unwrap();
                for i in 0..5 {
                    for j in 0..5 {
                        let dot: f64 = eig.vectors[i].iter().zip(&eig.vectors[j]).map(|(a, b)| a * b).sum();
                        let expected = if i == j { 1.0 } else { 0.0 };
                        prop_assert!((dot - expected).abs() <= 1e-10);
                    }
                }
            }

            #[test]
            fn sqrt_squares_back(m in sym5()) {
                // A^T A construction guarantees PSD.
                let mut rows = vec![vec![0.0; 5]; 5];
                for i in 0..5 {
                    for j in 0..5 {
                        rows[i][j] = (0..5).map(|k| m.get(k, i) * m.get(k, j)).sum();
                    }
                }
                let psd = SymMatrix::from_rows(&rows).unwrap();
                let r = psd_sqrt(&psd).unwrap();
                let mut err = 0.0f64;
                for i in 0..5 {
                    for j in 0..5 {
                        let rr: f64 = (0..5).map(|k| r.get(i, k) * r.get(k, j)).sum();
                        err += (rr - psd.get(i, j)).powi(2);
                    }
                }
                prop_assert!(err.sqrt() <= 1e-8 * (1.0 + psd.frobenius_norm()));
            }

            #[test]
            fn sqrt_norm_squared_equals_trace(m in sym5()) {
                let mut rows = vec![vec![0.0; 5]; 5];
                for i in 0..5 {
                    for j in 0..5 {
                        rows[i][j] = (0..5).map(|k| m.get(k, i) * m.get(k, j)).sum();
                    }
                }
                let psd = SymMatrix::from_rows(&rows).unwrap();
                let r = psd_sqrt(&psd).unwrap();
                let lhs = r.frobenius_norm().powi(2);
                let rhs = psd.trace();
                prop_assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + rhs.abs()));
            }

            #[test]
            fn scatter_has_no_meaningful_negative_eigenvalue(
                coords in proptest::collection::vec(-5.0f64..5.0, 4 * 3),
                raw_w in proptest::collection::vec(0.01f64..1.0, 4),
            ) {
                let points: Vec<Vec<f64>> = coords.chunks(3).map(|c| c.to_vec()).collect();
                let total: f64 = raw_w.iter().sum();
                let weights: Vec<f64> = raw_w.iter().map(|w| w / total).collect();
                let center = vec![0.0; 3];
                let s = weighted_scatter(&points, &weights, &center).unwrap();
                let eig = sym_eig(&s).unwrap();
                let min = eig.values.last().copied().unwrap();
                prop_assert!(min >= -1e-10 * s.frobenius_norm());
            }
        }
    }
}
