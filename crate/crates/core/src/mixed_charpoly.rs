//! Partial-assignment polynomials of the column-sampling interlacing family.
//!
//! Columns are drawn i.i.d. with `P(i) = w_i^{-2} / ||W^{-1}||_F^2`, and a draw
//! of column `i` contributes the rank-one term `w_i^2 a_i a_i^T`. After fixing
//! the first `j` draws `s_1..s_j`, the conditional expected characteristic
//! polynomial is
//!
//! ```text
//! f_{s_1..s_j}(x) = (1 - d/dz)^{k-j} det[xI - C + zB] |_{z=0}
//! C = sum_{i<=j} w_{s_i}^2 a_{s_i} a_{s_i}^T,   B = A A^T / ||W^{-1}||_F^2
//! ```
//!
//! Probability prefactors are dropped throughout; every polynomial returned
//! here is monic.

use crate::error::{Error, Result};
use crate::linalg::{char_poly, numerical_rank, singular_values, DenseMatrix, WeightVector, DEFAULT_RANK_TOL};
use crate::polynomial::{apply_shift_operator, Polynomial};

/// Largest `(1 - d/dz)` power accepted by [`collapse_operator`].
pub const MAX_COLLAPSE_ORDER: usize = 30;

/// `det[xI - C + zB]` stored as one x-polynomial per power of `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePoly {
    slices: Vec<Polynomial>,
}

impl BivariatePoly {
    pub fn from_slices(slices: Vec<Polynomial>) -> Self {
        assert!(!slices.is_empty(), "bivariate polynomial needs at least one slice");
        Self { slices }
    }

    pub fn slices(&self) -> &[Polynomial] {
        &self.slices
    }

    /// Coefficient polynomial of `z^i`; zero past the stored degree.
    pub fn slice(&self, i: usize) -> Polynomial {
        self.slices.get(i).cloned().unwrap_or_else(Polynomial::zero)
    }

    pub fn z_degree(&self) -> usize {
        self.slices.len() - 1
    }

    pub fn eval(&self, x: f64, z: f64) -> f64 {
        self.slices.iter().rev().fold(0.0, |acc, s| acc * z + s.eval(x))
    }
}

/// An ordered partial assignment `s_1..s_j` (0-based column indices) of a
/// length-`k` draw sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentPrefix {
    indices: Vec<usize>,
    k: usize,
}

impl AssignmentPrefix {
    /// Prefix of distinct indices, as produced by the greedy selection.
    pub fn new(indices: Vec<usize>, k: usize, m: usize) -> Result<Self> {
        let prefix = Self::with_repeats(indices, k, m)?;
        let mut seen = vec![false; m];
        for &s in &prefix.indices {
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::DuplicateIndex(s));
            }
        }
        Ok(prefix)
    }

    /// Prefix that may repeat indices. The i.i.d. draw model allows repeats;
    /// the verification code walks those branches of the family too.
    pub fn with_repeats(indices: Vec<usize>, k: usize, m: usize) -> Result<Self> {
        if indices.len() > k {
            return Err(Error::InvalidK {
                k,
                reason: format!("prefix of length {} is longer than k", indices.len()),
            });
        }
        if let Some(&s) = indices.iter().find(|&&s| s >= m) {
            return Err(Error::IndexOutOfRange { index: s, len: m });
        }
        Ok(Self { indices, k })
    }

    pub fn empty(k: usize) -> Self {
        Self { indices: Vec::new(), k }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// This prefix extended by one more draw.
    pub fn extended(&self, s: usize) -> Self {
        let mut indices = self.indices.clone();
        indices.push(s);
        Self { indices, k: self.k }
    }
}

/// Interpolates `det[xI - C + zB]` in `z` from characteristic polynomials of
/// `C - z_t B` at the nodes `z_t = 0, 1, ..., n`.
pub fn bivariate_det(c: &DenseMatrix, b: &DenseMatrix) -> Result<BivariatePoly> {
    let n = c.nrows();
    if c.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "C is {}x{}, B is {}x{}",
            c.nrows(),
            c.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }

    // values[t][j] = [x^j] det[xI - C + t B]
    let values: Vec<Vec<f64>> = (0..=n)
        .map(|t| {
            let shifted = DenseMatrix::new(c.as_nalgebra() - b.as_nalgebra() * t as f64)?;
            let p = char_poly(&shifted)?;
            Ok((0..=n).map(|j| p.coeff(j)).collect())
        })
        .collect::<Result<_>>()?;

    // [x^j] has z-degree at most n - j, so only the first n - j + 1 nodes are needed.
    let z_degree = numerical_rank(b, DEFAULT_RANK_TOL);
    let mut grid = vec![vec![0.0; n + 1]; z_degree + 1];
    for j in 0..=n {
        let deg = n - j;
        let nodes: Vec<f64> = (0..=deg).map(|t| t as f64).collect();
        let samples: Vec<f64> = (0..=deg).map(|t| values[t][j]).collect();
        let z_coeffs = interpolate_monomial(&nodes, &samples);
        for (i, &v) in z_coeffs.iter().enumerate().take(z_degree + 1) {
            grid[i][j] = v;
        }
    }
    let slices = grid.into_iter().map(Polynomial::from_vec).collect();
    Ok(BivariatePoly { slices })
}

/// Monomial coefficients of the interpolant through `(nodes[i], values[i])`,
/// via Newton divided differences.
fn interpolate_monomial(nodes: &[f64], values: &[f64]) -> Vec<f64> {
    let len = nodes.len();
    let mut dd = values.to_vec();
    for level in 1..len {
        for i in (level..len).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level]);
        }
    }
    let mut coeffs = vec![dd[len - 1]];
    for i in (0..len - 1).rev() {
        // coeffs <- coeffs * (z - nodes[i]) + dd[i]
        let mut next = vec![0.0; coeffs.len() + 1];
        for (p, &c) in coeffs.iter().enumerate() {
            next[p + 1] += c;
            next[p] -= nodes[i] * c;
        }
        next[0] += dd[i];
        coeffs = next;
    }
    coeffs
}

/// `(1 - d/dz)^d g(x, z) |_{z=0} = sum_i C(d, i) (-1)^i i! [z^i] g`.
pub fn collapse_operator(bp: &BivariatePoly, d: usize) -> Result<Polynomial> {
    if d > MAX_COLLAPSE_ORDER {
        return Err(Error::OrderTooLarge(d));
    }
    let mut acc = bp.slices[0].clone();
    // C(d, i) * i! = d (d-1) ... (d-i+1)
    let mut falling = 1.0;
    for i in 1..=d.min(bp.z_degree()) {
        falling *= (d - i + 1) as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc.add(&bp.slices[i].scale(sign * falling));
    }
    Ok(acc)
}

/// `sum_i w_{s_i}^2 a_{s_i} a_{s_i}^T` over the given (possibly repeated) indices.
pub fn weighted_outer_sum(a: &DenseMatrix, w: &WeightVector, indices: &[usize]) -> DenseMatrix {
    let n = a.nrows();
    let mut c = nalgebra::DMatrix::zeros(n, n);
    for &s in indices {
        let col = a.as_nalgebra().column(s) * w.get(s);
        c += &col * col.transpose();
    }
    DenseMatrix::new(c).expect("outer products of finite columns are finite")
}

/// `B = A A^T / ||W^{-1}||_F^2`, the second moment of one random draw.
pub fn draw_second_moment(a: &DenseMatrix, w: &WeightVector) -> DenseMatrix {
    let g = a.gram_rows();
    DenseMatrix::new(g.as_nalgebra() / w.inverse_frobenius_sq())
        .expect("scaled Gram matrix is finite")
}

/// `f_{s_1..s_j}` for the given prefix, normalized monic and of degree `n`.
pub fn partial_assignment_poly(a: &DenseMatrix, w: &WeightVector, prefix: &AssignmentPrefix) -> Result<Polynomial> {
    w.check_columns(a)?;
    let n = a.nrows();
    let k = prefix.k();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, reason: format!("must lie in 1..={n}") });
    }
    if let Some(&s) = prefix.indices().iter().find(|&&s| s >= a.ncols()) {
        return Err(Error::IndexOutOfRange { index: s, len: a.ncols() });
    }
    let c = weighted_outer_sum(a, w, prefix.indices());
    let j = prefix.len();
    if j == k {
        return char_poly(&c);
    }
    let b = draw_second_moment(a, w);
    let collapsed = collapse_operator(&bivariate_det(&c, &b)?, k - j)?;
    Ok(with_rank_structure(collapsed, n, k))
}

/// Imposes the known shape of a family polynomial: degree `n`, leading
/// coefficient 1, and a factor `x^{n-k}` (every term is the characteristic
/// polynomial of a sum of `k` rank-one matrices).
fn with_rank_structure(p: Polynomial, n: usize, k: usize) -> Polynomial {
    let mut coeffs: Vec<f64> = (0..=n).map(|i| p.coeff(i)).collect();
    for c in coeffs.iter_mut().take(n - k) {
        *c = 0.0;
    }
    coeffs[n] = 1.0;
    Polynomial::from_vec(coeffs)
}

/// Closed form of the expected characteristic polynomial:
/// `x^{n-k} prod_{i <= rank} (1 - sigma_i^2 / ||W^{-1}||_F^2 d/dx) x^k`.
pub fn expected_char_poly(a: &DenseMatrix, w: &WeightVector, k: usize) -> Result<Polynomial> {
    expected_char_poly_with_tol(a, w, k, DEFAULT_RANK_TOL)
}

pub fn expected_char_poly_with_tol(a: &DenseMatrix, w: &WeightVector, k: usize, rank_tol: f64) -> Result<Polynomial> {
    w.check_columns(a)?;
    let n = a.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, reason: format!("must lie in 1..={n}") });
    }
    let sv = singular_values(a);
    let rank = crate::linalg::rank_from_singular_values(&sv, rank_tol);
    let scale = w.inverse_frobenius_sq();
    let reduced = sv
        .iter()
        .take(rank)
        .fold(Polynomial::monomial(k), |p, s| apply_shift_operator(&p, s * s / scale));
    Ok(reduced.mul_x_pow(n - k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec()).unwrap()
    }

    fn assert_close(p: &Polynomial, want: &[f64], tol: f64) {
        for i in 0..want.len().max(p.coeffs().len()) {
            let w = want.get(i).copied().unwrap_or(0.0);
            assert!((p.coeff(i) - w).abs() <= tol, "{p} vs {want:?}");
        }
    }

    fn slices(bp: &BivariatePoly) -> Vec<Vec<f64>> {
        bp.slices().iter().map(|s| s.coeffs().to_vec()).collect()
    }

    #[test]
    fn bivariate_identity_b() {
        // (x + z)^2
        let bp = bivariate_det(&DenseMatrix::zeros(2, 2), &DenseMatrix::identity(2)).unwrap();
        assert_eq!(bp.z_degree(), 2);
        assert_close(&bp.slice(0), &[0.0, 0.0, 1.0], 1e-12);
        assert_close(&bp.slice(1), &[0.0, 2.0], 1e-12);
        assert_close(&bp.slice(2), &[1.0], 1e-12);
    }

    #[test]
    fn bivariate_zero_b() {
        let bp = bivariate_det(&DenseMatrix::identity(2), &DenseMatrix::zeros(2, 2)).unwrap();
        assert_eq!(bp.z_degree(), 0);
        assert_eq!(slices(&bp), vec![vec![1.0, -2.0, 1.0]]);
    }

    #[test]
    fn bivariate_mixed() {
        // (x - 1 + z/2)(x + z/2) = x^2 - x + z(x - 1/2) + z^2/4
        let c = DenseMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let b = DenseMatrix::from_diagonal(&[0.5, 0.5]).unwrap();
        let bp = bivariate_det(&c, &b).unwrap();
        assert_close(&bp.slice(0), &[0.0, -1.0, 1.0], 1e-12);
        assert_close(&bp.slice(1), &[-0.5, 1.0], 1e-12);
        assert_close(&bp.slice(2), &[0.25], 1e-12);
        assert!((bp.eval(0.3, -0.7) - (0.3 - 1.0 - 0.35) * (0.3 - 0.35)).abs() < 1e-12);
    }

    #[test]
    fn bivariate_dimension_mismatch() {
        let r = bivariate_det(&DenseMatrix::identity(2), &DenseMatrix::identity(3));
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn collapse_examples() {
        let square = BivariatePoly::from_slices(vec![poly(&[0.0, 0.0, 1.0]), poly(&[0.0, 2.0]), poly(&[1.0])]);
        assert_close(&collapse_operator(&square, 1).unwrap(), &[0.0, -2.0, 1.0], 0.0);
        assert_eq!(collapse_operator(&square, 0).unwrap(), square.slice(0));

        let mixed = BivariatePoly::from_slices(vec![poly(&[0.0, -1.0, 1.0]), poly(&[-0.5, 1.0]), poly(&[0.25])]);
        assert_close(&collapse_operator(&mixed, 1).unwrap(), &[0.5, -2.0, 1.0], 0.0);
        assert_eq!(collapse_operator(&mixed, 31), Err(Error::OrderTooLarge(31)));
    }

    #[test]
    fn partial_assignment_examples() {
        let a = DenseMatrix::identity(2);
        let w = WeightVector::ones(2);
        let f = partial_assignment_poly(&a, &w, &AssignmentPrefix::empty(1)).unwrap();
        assert_close(&f, &[0.0, -1.0, 1.0], 1e-12);
        let f = partial_assignment_poly(&a, &w, &AssignmentPrefix::new(vec![0], 2, 2).unwrap()).unwrap();
        assert_close(&f, &[0.5, -2.0, 1.0], 1e-12);
        let f = partial_assignment_poly(&a, &w, &AssignmentPrefix::new(vec![0, 1], 2, 2).unwrap()).unwrap();
        assert_close(&f, &[1.0, -2.0, 1.0], 1e-12);
    }

    #[test]
    fn partial_assignment_errors() {
        let a = DenseMatrix::identity(2);
        let w = WeightVector::ones(2);
        assert!(matches!(
            partial_assignment_poly(&a, &w, &AssignmentPrefix::empty(3)),
            Err(Error::InvalidK { k: 3, .. })
        ));
        assert_eq!(AssignmentPrefix::new(vec![1, 1], 2, 2), Err(Error::DuplicateIndex(1)));
        assert_eq!(
            AssignmentPrefix::new(vec![2], 2, 2),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        );
        assert!(AssignmentPrefix::new(vec![0, 1], 1, 2).is_err());
        assert!(AssignmentPrefix::with_repeats(vec![1, 1], 2, 2).is_ok());
    }

    #[test]
    fn expected_poly_examples() {
        let a = DenseMatrix::identity(2);
        let w = WeightVector::ones(2);
        assert_close(&expected_char_poly(&a, &w, 1).unwrap(), &[0.0, -1.0, 1.0], 1e-15);
        assert_close(&expected_char_poly(&a, &w, 2).unwrap(), &[0.5, -2.0, 1.0], 1e-15);
        let z = DenseMatrix::zeros(3, 2);
        assert_eq!(expected_char_poly(&z, &w, 3).unwrap(), Polynomial::monomial(3));
        assert!(expected_char_poly(&a, &w, 0).is_err());
        assert!(expected_char_poly(&a, &w, 3).is_err());
    }

    #[test]
    fn interpolation_reproduces_cubic() {
        let nodes = [0.0, 1.0, 2.0, 3.0];
        let f = |z: f64| 2.0 - z + 0.5 * z * z * z;
        let values: Vec<f64> = nodes.iter().map(|&z| f(z)).collect();
        let c = interpolate_monomial(&nodes, &values);
        for (g, w) in c.iter().zip([2.0, -1.0, 0.0, 0.5]) {
            assert!((g - w).abs() < 1e-13);
        }
    }
}
