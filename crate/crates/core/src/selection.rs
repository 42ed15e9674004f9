//! Greedy column selection over the interlacing family, and the lower bounds
//! it is certified against.
//!
//! At step `j` every unchosen column `s` is scored by the `k`-th largest root
//! of `f_{s_1..s_{j-1}, s}`; the best-scoring column is appended. The scores
//! never decrease along the run, so the final subset satisfies
//! `sigma_min(A_S W_S)^2 >= lambda_k(f_empty)`, which in turn dominates the
//! rank-based and stable-rank-based bounds reported here.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    rank_from_singular_values, sigma_min_subset, singular_values, symmetric_eigenvalues, DenseMatrix,
    WeightVector, DEFAULT_RANK_TOL,
};
use crate::mixed_charpoly::{
    expected_char_poly_with_tol, partial_assignment_poly, weighted_outer_sum, AssignmentPrefix,
};
use crate::polynomial::{real_roots_descending, DEFAULT_IMAG_TOL};

/// Relative gap below which two candidate scores count as tied.
pub const TIE_REL_TOL: f64 = 1e-10;

/// Numerical thresholds shared by the selection routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Singular values at or below `rank_rel * sigma_1` count as zero.
    pub rank_rel: f64,
    /// Imaginary residual tolerated when extracting polynomial roots.
    pub imag: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rank_rel: DEFAULT_RANK_TOL, imag: DEFAULT_IMAG_TOL }
    }
}

/// Slack used when comparing an achieved value against a guaranteed bound.
pub fn certification_slack(value: f64) -> f64 {
    1e-7 * (1.0 + value.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    /// Rank-based lower bound on `sigma_min^2` for the reported `r`.
    pub rank_bound: f64,
    /// Stable-rank lower bound, expressed on `sigma_min^2`.
    pub stable_bound: f64,
    pub srank2: f64,
    pub srank4: f64,
    pub r_used: usize,
    pub epsilon_used: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Chosen columns in selection order (0-based).
    pub subset: Vec<usize>,
    /// `lambda_k(f_{s_1..s_j})` for `j = 0..=k`; entry 0 is `lambda_k(f_empty)`.
    pub lambda_trace: Vec<f64>,
    /// `sigma_min(A_S W_S)^2`.
    pub sigma_min_sq: f64,
    pub bound_report: BoundReport,
    /// Largest imaginary residual seen while extracting candidate roots.
    pub max_residual_imag: f64,
    /// Number of candidate polynomials whose roots were flagged as suspect.
    pub flagged_roots: usize,
}

impl SelectionResult {
    pub fn sigma_min(&self) -> f64 {
        self.sigma_min_sq.max(0.0).sqrt()
    }

    pub fn expected_root(&self) -> f64 {
        self.lambda_trace[0]
    }

    /// The strongest of the guaranteed lower bounds on `sigma_min^2`.
    pub fn guaranteed_bound(&self) -> f64 {
        self.bound_report
            .rank_bound
            .max(self.bound_report.stable_bound)
            .max(self.expected_root())
    }

    /// True when the achieved `sigma_min^2` meets every guaranteed bound.
    pub fn is_certified(&self) -> bool {
        let bound = self.guaranteed_bound();
        self.sigma_min_sq >= bound - certification_slack(bound)
    }
}

/// Singular values together with the numerical rank they imply.
#[derive(Debug, Clone)]
struct Spectrum {
    sv: Vec<f64>,
    rank: usize,
}

impl Spectrum {
    fn of(a: &DenseMatrix, rank_rel: f64) -> Self {
        let sv = singular_values(a);
        let rank = rank_from_singular_values(&sv, rank_rel);
        Self { sv, rank }
    }
}

/// Schatten-4 stable rank `(sum sigma^2)^2 / sum sigma^4`.
///
/// Both sums come straight from entries: `sum sigma^2 = ||A||_F^2` and
/// `sum sigma^4 = ||A A^T||_F^2`.
pub fn srank4(a: &DenseMatrix) -> Result<f64> {
    if a.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let f2 = a.frobenius_norm_sq();
    let gram = if a.nrows() <= a.ncols() {
        a.gram_rows()
    } else {
        DenseMatrix::new(a.as_nalgebra().transpose() * a.as_nalgebra())?
    };
    Ok(f2 * f2 / gram.frobenius_norm_sq())
}

/// Schatten-2 stable rank `||A||_F^2 / ||A||_2^2`.
pub fn srank2(a: &DenseMatrix) -> Result<f64> {
    if a.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let top = singular_values(a)[0];
    Ok(a.frobenius_norm_sq() / (top * top))
}

/// Rank-based bound
/// `(sqrt r - sqrt(k-1))^2 / ||W^{-1}||_F^2 * r / sum_{i<=r} sigma_i^{-2}`.
pub fn bound_rank(a: &DenseMatrix, w: &WeightVector, k: usize, r: usize) -> Result<f64> {
    w.check_columns(a)?;
    bound_rank_from(&Spectrum::of(a, DEFAULT_RANK_TOL), w, k, r)
}

fn bound_rank_from(spec: &Spectrum, w: &WeightVector, k: usize, r: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidK { k, reason: "must be at least 1".into() });
    }
    if k > r {
        return Err(Error::InvalidR { r, reason: format!("must be at least k = {k}") });
    }
    if r > spec.rank {
        return Err(Error::InvalidR { r, reason: format!("exceeds numerical rank {}", spec.rank) });
    }
    let gap = (r as f64).sqrt() - ((k - 1) as f64).sqrt();
    let harmonic: f64 = spec.sv[..r].iter().map(|s| 1.0 / (s * s)).sum();
    Ok(gap * gap / w.inverse_frobenius_sq() * r as f64 / harmonic)
}

/// Stable-rank bound on `sigma_min^2` for a given `k`:
/// `(1 - sqrt((k-1)/srank4))^2 ||A||_F^2 / ||W^{-1}||_F^2`, or 0 once
/// `k - 1 >= srank4`.
pub fn stable_bound_for_k(a: &DenseMatrix, w: &WeightVector, k: usize) -> Result<f64> {
    w.check_columns(a)?;
    if k == 0 {
        return Err(Error::InvalidK { k, reason: "must be at least 1".into() });
    }
    let s4 = srank4(a)?;
    let ratio = (k - 1) as f64 / s4;
    if ratio >= 1.0 {
        return Ok(0.0);
    }
    let gap = 1.0 - ratio.sqrt();
    Ok(gap * gap * a.frobenius_norm_sq() / w.inverse_frobenius_sq())
}

/// Subset size `floor((1-eps)^2 srank4) + 1` and the guaranteed
/// `sigma_min >= eps ||A||_F / ||W^{-1}||_F`.
pub fn bound_stable(a: &DenseMatrix, w: &WeightVector, epsilon: f64) -> Result<(usize, f64)> {
    w.check_columns(a)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let s4 = srank4(a)?;
    let k = ((1.0 - epsilon).powi(2) * s4).floor() as usize + 1;
    let bound = epsilon * a.frobenius_norm_sq().sqrt() / w.inverse_frobenius_sq().sqrt();
    Ok((k, bound))
}

/// [`bound_stable`] under column normalization `W = diag(1/||a_i||)`, where
/// the bound is exactly `eps`.
pub fn normalized_bound(a: &DenseMatrix, epsilon: f64) -> Result<(usize, f64)> {
    let w = WeightVector::column_normalizing(a)?;
    let (k, _) = bound_stable(a, &w, epsilon)?;
    Ok((k, epsilon))
}

/// Greedy selection with default tolerances; `r` defaults to the numerical rank.
pub fn greedy_select(a: &DenseMatrix, w: &WeightVector, k: usize, r: Option<usize>) -> Result<SelectionResult> {
    greedy_select_with(a, w, k, r, &Tolerances::default())
}

pub fn greedy_select_with(
    a: &DenseMatrix,
    w: &WeightVector,
    k: usize,
    r: Option<usize>,
    tol: &Tolerances,
) -> Result<SelectionResult> {
    w.check_columns(a)?;
    let spec = Spectrum::of(a, tol.rank_rel);
    if k == 0 {
        return Err(Error::InvalidK { k, reason: "must be at least 1".into() });
    }
    if k > spec.rank {
        return Err(Error::RankExceeded { k, rank: spec.rank });
    }
    let r = r.unwrap_or(spec.rank);
    let rank_bound = bound_rank_from(&spec, w, k, r)?;

    let m = a.ncols();
    let expected = expected_char_poly_with_tol(a, w, k, tol.rank_rel)?;
    let root_list = real_roots_descending(&expected, tol.imag)?;
    let mut max_residual_imag = root_list.residual_imag;
    let mut flagged_roots = usize::from(root_list.flagged);
    let mut lambda_trace = vec![root_list.kth(k)?];

    let mut prefix = AssignmentPrefix::empty(k);
    for step in 1..=k {
        let scored: Vec<(usize, f64, f64, bool)> = (0..m)
            .into_par_iter()
            .filter(|s| !prefix.indices().contains(s))
            .map(|s| score_candidate(a, w, &prefix, s, step == k, tol))
            .collect::<Result<_>>()?;

        for &(_, _, residual, flagged) in &scored {
            max_residual_imag = max_residual_imag.max(residual);
            flagged_roots += usize::from(flagged);
        }
        let (best, value) = argmax_lowest_index(scored.iter().map(|&(s, v, _, _)| (s, v)))
            .expect("k <= rank <= m leaves at least one candidate");
        prefix = prefix.extended(best);
        lambda_trace.push(value);
    }

    let subset = prefix.indices().to_vec();
    let sigma_min = sigma_min_subset(a, w, &subset)?;
    let bound_report = BoundReport {
        rank_bound,
        stable_bound: stable_bound_for_k(a, w, k)?,
        srank2: srank2(a)?,
        srank4: srank4(a)?,
        r_used: r,
        epsilon_used: None,
    };
    Ok(SelectionResult {
        subset,
        lambda_trace,
        sigma_min_sq: sigma_min * sigma_min,
        bound_report,
        max_residual_imag,
        flagged_roots,
    })
}

/// Greedy selection at the stable-rank size for `epsilon`; the report
/// carries the `epsilon`-form bound `(eps ||A||_F / ||W^{-1}||_F)^2`.
pub fn select_stable(a: &DenseMatrix, w: &WeightVector, epsilon: f64, tol: &Tolerances) -> Result<SelectionResult> {
    let (k, bound) = bound_stable(a, w, epsilon)?;
    let mut result = greedy_select_with(a, w, k, None, tol)?;
    result.bound_report.stable_bound = bound * bound;
    result.bound_report.epsilon_used = Some(epsilon);
    Ok(result)
}

/// `lambda_k` of `f_{prefix, s}`, with the root-extraction residual and flag.
fn score_candidate(
    a: &DenseMatrix,
    w: &WeightVector,
    prefix: &AssignmentPrefix,
    s: usize,
    last: bool,
    tol: &Tolerances,
) -> Result<(usize, f64, f64, bool)> {
    let k = prefix.k();
    let extended = prefix.extended(s);
    if last {
        // With every draw fixed, f = det[xI - C]; its roots are the eigenvalues of C.
        let ev = symmetric_eigenvalues(&weighted_outer_sum(a, w, extended.indices()))?;
        return Ok((s, ev[k - 1], 0.0, false));
    }
    let f = partial_assignment_poly(a, w, &extended)?;
    let roots = real_roots_descending(&f, tol.imag)?;
    Ok((s, roots.kth(k)?, roots.residual_imag, roots.flagged))
}

/// Maximum over `(index, value)` pairs given in ascending index order; values
/// within [`TIE_REL_TOL`] of the incumbent do not displace it.
fn argmax_lowest_index(candidates: impl Iterator<Item = (usize, f64)>) -> Option<(usize, f64)> {
    candidates.fold(None, |best, (s, v)| match best {
        None => Some((s, v)),
        Some((_, bv)) if v - bv > TIE_REL_TOL * v.abs().max(bv.abs()) => Some((s, v)),
        keep => keep,
    })
}
