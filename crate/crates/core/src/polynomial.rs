//! Univariate real polynomials and the operations the selection algorithm
//! needs on them: differentiation, the `(1 - c d/dx)` operator, real root
//! extraction through a balanced companion matrix, and the lower barrier
//! potential `-p'(b) / p(b)`.

use std::fmt;

use nalgebra::{DMatrix, Schur};

use crate::error::{Error, Result};

/// Default bound on the imaginary residual tolerated by [`real_roots_descending`].
pub const DEFAULT_IMAG_TOL: f64 = 1e-7;

/// Coefficients below this fraction of the largest one are dropped by [`Polynomial::trimmed`].
pub const TRIM_REL_TOL: f64 = 1e-13;

/// Real polynomial stored in ascending-degree order (`coeffs[i]` multiplies `x^i`).
///
/// The zero polynomial is `[0.0]`; otherwise the last coefficient is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial, dropping exactly-zero leading coefficients.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoefficient);
        }
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Ok(Self { coeffs })
    }

    /// Internal constructor for coefficient vectors known to be finite.
    pub(crate) fn from_vec(coeffs: Vec<f64>) -> Self {
        debug_assert!(coeffs.iter().all(|c| c.is_finite()));
        let mut p = Self { coeffs };
        p.normalize_zeros();
        p
    }

    fn normalize_zeros(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == 0.0 {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(0.0);
        }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_vec(vec![c])
    }

    /// `x^d`.
    pub fn monomial(d: usize) -> Self {
        let mut coeffs = vec![0.0; d + 1];
        coeffs[d] = 1.0;
        Self { coeffs }
    }

    /// Monic polynomial `prod_i (x - r_i)`.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut coeffs = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= r * c;
            }
            coeffs = next;
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading_coefficient(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    /// Coefficient of `x^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_vec(self.coeffs.iter().map(|v| v * c).collect())
    }

    /// Divides by the leading coefficient. The zero polynomial is returned unchanged.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(1.0 / self.leading_coefficient())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::from_vec((0..len).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::from_vec((0..len).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_vec(out)
    }

    /// `x^d * p(x)`.
    pub fn mul_x_pow(&self, d: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0.0; d];
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    /// Drops leading coefficients with `|c| < rel_tol * max|c|`.
    pub fn trimmed(&self, rel_tol: f64) -> Self {
        let cutoff = rel_tol * self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() > 1 && coeffs.last().unwrap().abs() < cutoff {
            coeffs.pop();
        }
        Self::from_vec(coeffs)
    }

    /// Largest coefficient deviation, relative to the larger coefficient scale of the two.
    pub fn max_rel_deviation(&self, other: &Self) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        let scale = self.max_abs_coeff().max(other.max_abs_coeff()).max(f64::MIN_POSITIVE);
        (0..len)
            .map(|i| (self.coeff(i) - other.coeff(i)).abs())
            .fold(0.0, f64::max)
            / scale
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 && !(self.is_zero() && i == 0) {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            let mag = c.abs();
            match i {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}x")?,
                _ => write!(f, "{mag}x^{i}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// Real roots in nonincreasing order, with multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct RootList {
    pub roots: Vec<f64>,
    /// Largest imaginary part discarded during extraction.
    pub residual_imag: f64,
    /// Set when `residual_imag` exceeds the tolerance the caller asked for.
    pub flagged: bool,
}

impl RootList {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// `k`-th largest root, 1-based.
    pub fn kth(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.roots.len() {
            return Err(Error::RootIndexOutOfRange { k, degree: self.roots.len() });
        }
        Ok(self.roots[k - 1])
    }

    pub fn min(&self) -> Option<f64> {
        self.roots.last().copied()
    }
}

/// `p'`.
pub fn differentiate(p: &Polynomial) -> Polynomial {
    if p.degree() == 0 {
        return Polynomial::zero();
    }
    Polynomial::from_vec(
        p.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| i as f64 * c)
            .collect(),
    )
}

/// `(1 - c d/dx) p = p - c p'`.
pub fn apply_shift_operator(p: &Polynomial, c: f64) -> Polynomial {
    let dp = differentiate(p);
    let coeffs = (0..p.coeffs.len())
        .map(|i| p.coeff(i) - c * dp.coeff(i))
        .collect();
    Polynomial::from_vec(coeffs)
}

/// Roots of `p` via the eigenvalues of the balanced companion matrix of its
/// monic normalization. Exact zero low-order coefficients are split off as
/// zero roots before the eigenvalue solve.
///
/// The result is flagged when the discarded imaginary parts exceed
/// `imag_tol * (1 + max|root|)`.
pub fn real_roots_descending(p: &Polynomial, imag_tol: f64) -> Result<RootList> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let zero_roots = p.coeffs.iter().take_while(|&&c| c == 0.0).count();
    let reduced = &p.coeffs[zero_roots..];
    let degree = reduced.len() - 1;

    let mut roots = vec![0.0; zero_roots];
    let mut residual_imag = 0.0_f64;
    match degree {
        0 => {}
        1 => roots.push(-reduced[0] / reduced[1]),
        _ => {
            let lead = reduced[degree];
            let mut companion = DMatrix::zeros(degree, degree);
            for j in 0..degree {
                companion[(0, j)] = -reduced[degree - 1 - j] / lead;
            }
            for i in 1..degree {
                companion[(i, i - 1)] = 1.0;
            }
            balance(&mut companion);
            let schur = Schur::try_new(companion, f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
            for z in schur.complex_eigenvalues().iter() {
                residual_imag = residual_imag.max(z.im.abs());
                roots.push(z.re);
            }
        }
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    let biggest = roots.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    let flagged = residual_imag > imag_tol * (1.0 + biggest);
    Ok(RootList { roots, residual_imag, flagged })
}

/// `k`-th largest root (1-based) using [`DEFAULT_IMAG_TOL`].
pub fn kth_largest_root(p: &Polynomial, k: usize) -> Result<f64> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if k == 0 || k > p.degree() {
        return Err(Error::RootIndexOutOfRange { k, degree: p.degree() });
    }
    real_roots_descending(p, DEFAULT_IMAG_TOL)?.kth(k)
}

/// Lower barrier potential `Phi_p(b) = -p'(b) / p(b)`.
///
/// For `b` below every root this equals `sum_i 1 / (lambda_i - b)`.
pub fn lower_barrier(p: &Polynomial, b: f64) -> Result<f64> {
    let value = p.eval(b);
    if value == 0.0 {
        return Err(Error::AtRoot(b));
    }
    Ok(-differentiate(p).eval(b) / value)
}

/// Parlett-Reinsch diagonal similarity scaling with radix 2 (exact in binary).
fn balance(a: &mut DMatrix<f64>) {
    const RADIX: f64 = 2.0;
    const SQRDX: f64 = RADIX * RADIX;
    let n = a.nrows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= SQRDX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= SQRDX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let ginv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= ginv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec()).unwrap()
    }

    fn assert_coeffs(p: &Polynomial, want: &[f64], tol: f64) {
        assert_eq!(p.coeffs().len(), want.len(), "{p} vs {want:?}");
        for (g, w) in p.coeffs().iter().zip(want) {
            assert!((g - w).abs() <= tol, "{p} vs {want:?}");
        }
    }

    #[test]
    fn differentiate_examples() {
        assert_coeffs(&differentiate(&Polynomial::monomial(2)), &[0.0, 2.0], 0.0);
        assert!(differentiate(&Polynomial::constant(5.0)).is_zero());
        assert_coeffs(&differentiate(&poly(&[0.0, -3.0, 0.0, 1.0])), &[-3.0, 0.0, 3.0], 0.0);
    }

    #[test]
    fn shift_operator_examples() {
        let x = Polynomial::monomial(1);
        let twice = apply_shift_operator(&apply_shift_operator(&x, 0.5), 0.5);
        assert_coeffs(&twice, &[-1.0, 1.0], 0.0);

        let x2 = Polynomial::monomial(2);
        let twice = apply_shift_operator(&apply_shift_operator(&x2, 0.5), 0.5);
        assert_coeffs(&twice, &[0.5, -2.0, 1.0], 0.0);

        let x3 = Polynomial::monomial(3);
        assert_eq!(apply_shift_operator(&x3, 0.0), x3);
    }

    #[test]
    fn shift_operator_keeps_leading_term() {
        let p = poly(&[1.0, 2.0, -3.0, 0.5]);
        let q = apply_shift_operator(&p, 2.5);
        assert_eq!(q.degree(), 3);
        assert_eq!(q.leading_coefficient(), 0.5);
    }

    #[test]
    fn roots_examples() {
        let r = real_roots_descending(&poly(&[0.0, -1.0, 1.0]), DEFAULT_IMAG_TOL).unwrap();
        assert_eq!(r.roots, vec![1.0, 0.0]);

        let r = real_roots_descending(&poly(&[0.5, -2.0, 1.0]), DEFAULT_IMAG_TOL).unwrap();
        let s = 0.5f64.sqrt();
        assert!((r.roots[0] - (1.0 + s)).abs() < 1e-14);
        assert!((r.roots[1] - (1.0 - s)).abs() < 1e-14);
        assert!((r.roots[0] - 1.707107).abs() < 1e-6);

        let r = real_roots_descending(&poly(&[1.0, -2.0, 1.0]), DEFAULT_IMAG_TOL).unwrap();
        assert!((r.roots[0] - 1.0).abs() < 1e-7 && (r.roots[1] - 1.0).abs() < 1e-7);
        assert!(!r.flagged);
    }

    #[test]
    fn roots_of_zero_polynomial_fail() {
        assert_eq!(real_roots_descending(&Polynomial::zero(), 1e-7), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn complex_roots_are_flagged() {
        let r = real_roots_descending(&poly(&[1.0, 0.0, 1.0]), DEFAULT_IMAG_TOL).unwrap();
        assert!(r.flagged);
        assert!((r.residual_imag - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kth_root_examples() {
        assert_eq!(kth_largest_root(&poly(&[0.0, -1.0, 1.0]), 2).unwrap(), 0.0);
        let v = kth_largest_root(&poly(&[0.5, -2.0, 1.0]), 2).unwrap();
        assert!((v - (1.0 - 0.5f64.sqrt())).abs() < 1e-14);
        let cubic = Polynomial::from_roots(&[0.0, 1.0, 2.0]);
        assert!((kth_largest_root(&cubic, 1).unwrap() - 2.0).abs() < 1e-13);
        assert_eq!(
            kth_largest_root(&cubic, 4),
            Err(Error::RootIndexOutOfRange { k: 4, degree: 3 })
        );
        assert!(kth_largest_root(&cubic, 0).is_err());
    }

    #[test]
    fn barrier_examples() {
        assert!((lower_barrier(&poly(&[0.0, -1.0, 1.0]), -1.0).unwrap() - 1.5).abs() < 1e-15);
        assert!((lower_barrier(&Polynomial::monomial(1), -1.0).unwrap() - 1.0).abs() < 1e-15);
        let sq = Polynomial::from_roots(&[2.0, 2.0]);
        assert!((lower_barrier(&sq, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(lower_barrier(&sq, 2.0), Err(Error::AtRoot(2.0)));
    }

    #[test]
    fn trimming_drops_tiny_leading_terms() {
        let p = poly(&[1.0, 2.0, 1e-16]);
        assert_eq!(p.trimmed(TRIM_REL_TOL).degree(), 1);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(Polynomial::new(vec![1.0, f64::NAN]), Err(Error::NonFiniteCoefficient));
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(poly(&[0.5, -2.0, 1.0]).to_string(), "1x^2 - 2x + 0.5");
    }
}
