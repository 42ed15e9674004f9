//! Dense real linear algebra used throughout the crate.
//!
//! Decompositions are delegated to `nalgebra`; this module adds validated
//! matrix/weight newtypes and the handful of derived quantities the
//! selection code needs (numerical rank, smallest singular value of a
//! weighted column subset, characteristic polynomials).

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::polynomial::Polynomial;

/// Default relative tolerance for [`numerical_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

const SYMMETRY_TOL: f64 = 1e-12;

/// A real `n x m` matrix with finite entries and `n, m >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    inner: DMatrix<f64>,
}

impl DenseMatrix {
    /// Wraps an existing `nalgebra` matrix after validation.
    pub fn new(inner: DMatrix<f64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::EmptyMatrix);
        }
        for j in 0..inner.ncols() {
            for i in 0..inner.nrows() {
                if !inner[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { inner })
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_slice(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch { rows, cols, got: data.len() });
        }
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        Self::new(DMatrix::from_row_slice(rows, cols, data))
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::ShapeMismatch { rows: n, cols: m, got: bad.len() });
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_row_slice(n, m, &flat)
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "identity of size 0");
        Self { inner: DMatrix::identity(n, n) }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty zero matrix");
        Self { inner: DMatrix::zeros(rows, cols) }
    }

    /// Square diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        Self::new(m)
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.inner.nrows()
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.inner.ncols()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.inner[(row, col)]
    }

    pub fn as_nalgebra(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_nalgebra(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.inner.column(j).iter().copied().collect()
    }

    pub fn column_norms(&self) -> Vec<f64> {
        (0..self.ncols()).map(|j| self.inner.column(j).norm()).collect()
    }

    /// `||A||_F^2`, summed directly from the entries.
    pub fn frobenius_norm_sq(&self) -> f64 {
        self.inner.iter().map(|v| v * v).sum()
    }

    /// `A A^T`.
    pub fn gram_rows(&self) -> DenseMatrix {
        DenseMatrix { inner: &self.inner * self.inner.transpose() }
    }

    pub fn is_zero(&self) -> bool {
        self.inner.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Result<DenseMatrix> {
        DenseMatrix::new(&self.inner * c)
    }

    /// Largest absolute asymmetry `|M_ij - M_ji|` of a square matrix.
    fn asymmetry(&self) -> f64 {
        let n = self.nrows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.inner[(i, j)] - self.inner[(j, i)]).abs());
            }
        }
        worst
    }

    fn require_symmetric(&self) -> Result<()> {
        if self.nrows() != self.ncols() {
            return Err(Error::NotSquare { rows: self.nrows(), cols: self.ncols() });
        }
        let scale = self.inner.amax().max(f64::MIN_POSITIVE);
        let asym = self.asymmetry();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(())
    }
}

/// Diagonal of the column weighting `W`; every entry is finite and nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyWeights);
        }
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFiniteWeight { index });
            }
            if w == 0.0 {
                return Err(Error::ZeroWeight { index });
            }
        }
        Ok(Self { weights })
    }

    /// The identity weighting `W = I`.
    pub fn ones(m: usize) -> Self {
        assert!(m > 0, "empty weight vector");
        Self { weights: vec![1.0; m] }
    }

    /// `W = diag(1 / ||a_i||)`, which normalizes every column of `a`.
    pub fn column_normalizing(a: &DenseMatrix) -> Result<Self> {
        let norms = a.column_norms();
        if let Some(j) = norms.iter().position(|&n| n == 0.0) {
            return Err(Error::ZeroColumn(j));
        }
        Self::new(norms.iter().map(|n| 1.0 / n).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// `||W^{-1}||_F^2 = sum_i w_i^{-2}`.
    pub fn inverse_frobenius_sq(&self) -> f64 {
        self.weights.iter().map(|w| 1.0 / (w * w)).sum()
    }

    /// Sampling probabilities `p_i = w_i^{-2} / ||W^{-1}||_F^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        let total = self.inverse_frobenius_sq();
        self.weights.iter().map(|w| 1.0 / (w * w) / total).collect()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.weights.iter().map(|w| w * c).collect())
    }

    pub(crate) fn check_columns(&self, a: &DenseMatrix) -> Result<()> {
        if self.len() != a.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for a matrix with {} columns",
                self.len(),
                a.ncols()
            )));
        }
        Ok(())
    }
}

/// Singular values in nonincreasing order; `min(n, m)` of them.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = a
        .as_nalgebra()
        .singular_values_unordered()
        .iter()
        .map(|s| s.max(0.0))
        .collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Number of singular values strictly above `rel_tol * sigma_1`.
pub fn numerical_rank(a: &DenseMatrix, rel_tol: f64) -> usize {
    rank_from_singular_values(&singular_values(a), rel_tol)
}

pub(crate) fn rank_from_singular_values(sv: &[f64], rel_tol: f64) -> usize {
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Validates a 0-based index set against `m` columns.
pub(crate) fn check_subset(subset: &[usize], m: usize) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut seen = vec![false; m];
    for &s in subset {
        if s >= m {
            return Err(Error::IndexOutOfRange { index: s, len: m });
        }
        if seen[s] {
            return Err(Error::DuplicateIndex(s));
        }
        seen[s] = true;
    }
    Ok(())
}

/// The `n x |S|` matrix whose `j`-th column is `w_{s_j} a_{s_j}`.
pub fn weighted_submatrix(a: &DenseMatrix, w: &WeightVector, subset: &[usize]) -> Result<DenseMatrix> {
    w.check_columns(a)?;
    check_subset(subset, a.ncols())?;
    let n = a.nrows();
    let sub = DMatrix::from_fn(n, subset.len(), |i, j| {
        let s = subset[j];
        w.get(s) * a.get(i, s)
    });
    DenseMatrix::new(sub)
}

/// `sigma_min(A_S W_S)` for a 0-based, duplicate-free index set `S`.
///
/// When `|S| > n` the columns are necessarily dependent and the result is 0.
pub fn sigma_min_subset(a: &DenseMatrix, w: &WeightVector, subset: &[usize]) -> Result<f64> {
    let sub = weighted_submatrix(a, w, subset)?;
    if subset.len() > a.nrows() {
        return Ok(0.0);
    }
    Ok(singular_values(&sub).last().copied().unwrap_or(0.0))
}

/// Eigenvalues of a symmetric matrix, nonincreasing.
pub fn symmetric_eigenvalues(m: &DenseMatrix) -> Result<Vec<f64>> {
    m.require_symmetric()?;
    let mut ev: Vec<f64> = SymmetricEigen::try_new(m.as_nalgebra().clone(), f64::EPSILON, 0)
        .ok_or(Error::NoConvergence)?
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    Ok(ev)
}

/// `det[xI - M]` for a symmetric `M`, built as the product of `(x - lambda_i)`.
pub fn char_poly(m: &DenseMatrix) -> Result<Polynomial> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(Polynomial::from_roots(&symmetric_eigenvalues(m)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn singular_values_examples() {
        assert_eq!(singular_values(&DenseMatrix::identity(2)), vec![1.0, 1.0]);
        let d = DenseMatrix::from_diagonal(&[3.0, 0.0]).unwrap();
        assert_eq!(singular_values(&d), vec![3.0, 0.0]);
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let sv = singular_values(&a);
        assert!(close(sv[0], 2f64.sqrt(), 1e-14));
        assert!(close(sv[1], 0.0, 1e-14));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&DenseMatrix::identity(3), 1e-10), 3);
        assert_eq!(numerical_rank(&DenseMatrix::zeros(2, 2), 1e-10), 0);
        let d = DenseMatrix::from_diagonal(&[1.0, 1e-14]).unwrap();
        assert_eq!(numerical_rank(&d, 1e-10), 1);
    }

    #[test]
    fn sigma_min_subset_examples() {
        let i2 = DenseMatrix::identity(2);
        assert!(close(sigma_min_subset(&i2, &WeightVector::ones(2), &[0, 1]).unwrap(), 1.0, 1e-15));
        let w = WeightVector::new(vec![2.0, 1.0]).unwrap();
        assert!(close(sigma_min_subset(&i2, &w, &[1]).unwrap(), 1.0, 1e-15));

        // eigenvalues of A^T A = [[1,1],[1,2]] are (3 +- sqrt 5)/2
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let expected = ((3.0 - 5f64.sqrt()) / 2.0).sqrt();
        let got = sigma_min_subset(&a, &WeightVector::ones(2), &[0, 1]).unwrap();
        assert!(close(got, expected, 1e-14));
        assert!(close(got, 0.618034, 1e-6));
    }

    #[test]
    fn sigma_min_subset_errors() {
        let a = DenseMatrix::identity(2);
        let w = WeightVector::ones(2);
        assert_eq!(sigma_min_subset(&a, &w, &[]), Err(Error::EmptySubset));
        assert_eq!(sigma_min_subset(&a, &w, &[2]), Err(Error::IndexOutOfRange { index: 2, len: 2 }));
        assert_eq!(sigma_min_subset(&a, &w, &[1, 1]), Err(Error::DuplicateIndex(1)));
        let w3 = WeightVector::ones(3);
        assert!(matches!(sigma_min_subset(&a, &w3, &[0]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn wide_subset_is_singular() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0, 1.0]]).unwrap();
        assert_eq!(sigma_min_subset(&a, &WeightVector::ones(3), &[0, 2]).unwrap(), 0.0);
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(char_poly(&DenseMatrix::zeros(2, 2)).unwrap().coeffs(), &[0.0, 0.0, 1.0]);
        assert_eq!(char_poly(&DenseMatrix::identity(2)).unwrap().coeffs(), &[1.0, -2.0, 1.0]);
        let m = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let p = char_poly(&m).unwrap();
        for (got, want) in p.coeffs().iter().zip([3.0, -4.0, 1.0]) {
            assert!(close(*got, want, 1e-13));
        }
    }

    #[test]
    fn char_poly_rejects_bad_input() {
        let rect = DenseMatrix::zeros(2, 3);
        assert_eq!(char_poly(&rect), Err(Error::NotSquare { rows: 2, cols: 3 }));
        let asym = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(char_poly(&asym), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn matrix_validation() {
        assert_eq!(DenseMatrix::from_row_slice(0, 0, &[]), Err(Error::EmptyMatrix));
        assert_eq!(
            DenseMatrix::from_row_slice(1, 2, &[1.0, f64::NAN]),
            Err(Error::NonFinite { row: 0, col: 1 })
        );
        assert!(matches!(
            DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn weight_validation() {
        assert_eq!(WeightVector::new(vec![1.0, 0.0]), Err(Error::ZeroWeight { index: 1 }));
        assert_eq!(WeightVector::new(vec![]), Err(Error::EmptyWeights));
        assert_eq!(WeightVector::new(vec![f64::INFINITY]), Err(Error::NonFiniteWeight { index: 0 }));
        let w = WeightVector::new(vec![-2.0, 0.5]).unwrap();
        assert!(close(w.inverse_frobenius_sq(), 0.25 + 4.0, 1e-15));
        let p = w.probabilities();
        assert!(close(p[0] + p[1], 1.0, 1e-15));
        assert!(close(p[0], 0.25 / 4.25, 1e-15));
    }
}
