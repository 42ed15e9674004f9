//! Exhaustive verifiers for desk-sized instances.
//!
//! Nothing here goes through the interpolation or closed-form machinery of
//! [`crate::mixed_charpoly`] except where a check is explicitly comparing
//! the two routes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{char_poly, sigma_min_subset, symmetric_eigenvalues, DenseMatrix, WeightVector};
use crate::mixed_charpoly::{
    bivariate_det, collapse_operator, expected_char_poly, partial_assignment_poly, weighted_outer_sum,
    AssignmentPrefix,
};
use crate::polynomial::{real_roots_descending, Polynomial, DEFAULT_IMAG_TOL};

/// Relative per-coefficient tolerance for polynomial identities.
pub const POLY_MATCH_TOL: f64 = 1e-8;
/// Slack for the root sandwich check.
pub const SANDWICH_SLACK: f64 = 1e-7;

/// Enumeration limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    /// Number of `k`-subsets searched by [`brute_force_best_subset`].
    pub subsets: u128,
    /// Number of ordered assignments summed by [`brute_force_expected_poly`].
    pub assignments: u128,
    /// Number of assignments walked by [`check_interlacing_consequence`].
    pub interlacing: u128,
}

impl Default for Budgets {
    fn default() -> Self {
        Self { subsets: 1_000_000, assignments: 100_000, interlacing: 10_000 }
    }
}

impl Budgets {
    pub fn uniform(limit: u128) -> Self {
        Self { subsets: limit, assignments: limit, interlacing: limit }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    /// Lexicographically smallest maximizer (0-based).
    pub best_subset: Vec<usize>,
    /// Largest `sigma_min(A_S W_S)` over all `k`-subsets.
    pub best_value: f64,
    pub expected_poly_match: bool,
    pub expected_poly_deviation: f64,
    pub interlacing_ok: bool,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn power(base: usize, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

fn check_k(k: usize, m: usize) -> Result<()> {
    if k == 0 || k > m {
        return Err(Error::InvalidK { k, reason: format!("must lie in 1..={m}") });
    }
    Ok(())
}

/// Next `k`-combination of `0..m` in lexicographic order.
fn next_combination(c: &mut [usize], m: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < m - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Next tuple of `[m]^k` in lexicographic order.
fn next_tuple(t: &mut [usize], m: usize) -> bool {
    for i in (0..t.len()).rev() {
        if t[i] + 1 < m {
            t[i] += 1;
            for x in &mut t[i + 1..] {
                *x = 0;
            }
            return true;
        }
    }
    false
}

/// Exhaustive maximizer of `sigma_min(A_S W_S)` over all `k`-subsets.
pub fn brute_force_best_subset(a: &DenseMatrix, w: &WeightVector, k: usize, budget: u128) -> Result<(Vec<usize>, f64)> {
    w.check_columns(a)?;
    let m = a.ncols();
    check_k(k, m)?;
    let needed = binomial(m, k);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut comb: Vec<usize> = (0..k).collect();
    let mut best = (comb.clone(), sigma_min_subset(a, w, &comb)?);
    while next_combination(&mut comb, m) {
        let v = sigma_min_subset(a, w, &comb)?;
        if v > best.1 + 1e-12 * best.1.abs().max(1.0) {
            best = (comb.clone(), v);
        }
    }
    Ok(best)
}

/// `sum over (s_1..s_k) in [m]^k of (prod p_{s_i}) det[xI - sum w_{s_i}^2 a_{s_i} a_{s_i}^T]`.
pub fn brute_force_expected_poly(a: &DenseMatrix, w: &WeightVector, k: usize, budget: u128) -> Result<Polynomial> {
    w.check_columns(a)?;
    let m = a.ncols();
    if k == 0 {
        return Err(Error::InvalidK { k, reason: "must be at least 1".into() });
    }
    let needed = power(m, k);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let probs = w.probabilities();
    let mut tuple = vec![0; k];
    let mut total = Polynomial::zero();
    loop {
        let weight: f64 = tuple.iter().map(|&s| probs[s]).product();
        let leaf = char_poly(&weighted_outer_sum(a, w, &tuple))?;
        total = total.add(&leaf.scale(weight));
        if !next_tuple(&mut tuple, m) {
            break;
        }
    }
    Ok(total)
}

/// Checks the observable consequences of the family being interlacing:
///
/// * for every `j`, `lambda_j(f_empty)` lies between the smallest and largest
///   `lambda_j` over all leaf assignments;
/// * every internal node equals the probability-weighted sum of its children.
pub fn check_interlacing_consequence(a: &DenseMatrix, w: &WeightVector, k: usize, budget: u128) -> Result<bool> {
    w.check_columns(a)?;
    let n = a.nrows();
    let m = a.ncols();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, reason: format!("must lie in 1..={n}") });
    }
    let needed = power(m, k);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }

    let root_poly = expected_char_poly(a, w, k)?;
    let root_roots = real_roots_descending(&root_poly, DEFAULT_IMAG_TOL)?;
    if root_roots.flagged {
        return Ok(false);
    }

    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    let mut tuple = vec![0; k];
    loop {
        let ev = symmetric_eigenvalues(&weighted_outer_sum(a, w, &tuple))?;
        for (j, &e) in ev.iter().enumerate() {
            lo[j] = lo[j].min(e);
            hi[j] = hi[j].max(e);
        }
        if !next_tuple(&mut tuple, m) {
            break;
        }
    }
    let sandwich = root_roots.roots.iter().enumerate().all(|(j, &r)| {
        let slack = SANDWICH_SLACK * (1.0 + r.abs());
        lo[j] - slack <= r && r <= hi[j] + slack
    });
    if !sandwich {
        return Ok(false);
    }

    one_step_recursion_holds(a, w, &AssignmentPrefix::empty(k), &root_poly)
}

/// `f_prefix == sum_s p_s f_{prefix, s}` at this node and, recursively, below it.
fn one_step_recursion_holds(a: &DenseMatrix, w: &WeightVector, prefix: &AssignmentPrefix, node: &Polynomial) -> Result<bool> {
    if prefix.len() == prefix.k() {
        return Ok(true);
    }
    let probs = w.probabilities();
    let mut sum = Polynomial::zero();
    let mut children = Vec::with_capacity(probs.len());
    for (s, &p) in probs.iter().enumerate() {
        let child_prefix = AssignmentPrefix::with_repeats(
            prefix.indices().iter().copied().chain([s]).collect(),
            prefix.k(),
            probs.len(),
        )?;
        let child = partial_assignment_poly(a, w, &child_prefix)?;
        sum = sum.add(&child.scale(p));
        children.push((child_prefix, child));
    }
    if node.max_rel_deviation(&sum) > POLY_MATCH_TOL {
        return Ok(false);
    }
    for (child_prefix, child) in &children {
        if !one_step_recursion_holds(a, w, child_prefix, child)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Compares both sides of the rank-one expectation identity
/// `E det[xI - C - r r^T] = (1 - d/dt) det[xI - C + t E[r r^T]] |_{t=0}`
/// for a finitely supported random vector `r`, given as `(probability, value)`
/// pairs. Returns the largest absolute coefficient difference.
pub fn rank_one_expectation_deviation(c: &DenseMatrix, support: &[(f64, Vec<f64>)]) -> Result<f64> {
    let n = c.nrows();
    if let Some((_, v)) = support.iter().find(|(_, v)| v.len() != n) {
        return Err(Error::DimensionMismatch(format!("support vector of length {} for n = {n}", v.len())));
    }
    let mut lhs = Polynomial::zero();
    let mut second_moment = nalgebra::DMatrix::zeros(n, n);
    for (p, v) in support {
        let v = nalgebra::DVector::from_column_slice(v);
        let outer = &v * v.transpose();
        let shifted = DenseMatrix::new(c.as_nalgebra() + &outer)?;
        lhs = lhs.add(&char_poly(&shifted)?.scale(*p));
        second_moment += outer * *p;
    }
    let rhs = collapse_operator(&bivariate_det(c, &DenseMatrix::new(second_moment)?)?, 1)?;
    let len = lhs.coeffs().len().max(rhs.coeffs().len());
    Ok((0..len).map(|i| (lhs.coeff(i) - rhs.coeff(i)).abs()).fold(0.0, f64::max))
}

/// Runs every oracle on one instance.
pub fn verify(a: &DenseMatrix, w: &WeightVector, k: usize, budgets: &Budgets) -> Result<OracleReport> {
    let (best_subset, best_value) = brute_force_best_subset(a, w, k, budgets.subsets)?;
    let enumerated = brute_force_expected_poly(a, w, k, budgets.assignments)?;
    let closed = expected_char_poly(a, w, k)?;
    let expected_poly_deviation = closed.max_rel_deviation(&enumerated);
    let interlacing_ok = check_interlacing_consequence(a, w, k, budgets.interlacing)?;
    Ok(OracleReport {
        best_subset,
        best_value,
        expected_poly_match: expected_poly_deviation <= POLY_MATCH_TOL,
        expected_poly_deviation,
        interlacing_ok,
    })
}
