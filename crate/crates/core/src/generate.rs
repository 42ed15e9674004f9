//! Seeded random test matrices.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::DenseMatrix;

/// Singular value profiles for generated matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumShape {
    /// All singular values equal to 1.
    Flat,
    /// `sigma_i = 1 / sqrt(i)`.
    Decay,
    /// `sigma_1 = 1`, the rest `1 / sqrt(m)`.
    Spiked,
}

impl SpectrumShape {
    pub const ALL: [SpectrumShape; 3] = [SpectrumShape::Flat, SpectrumShape::Decay, SpectrumShape::Spiked];

    pub fn name(self) -> &'static str {
        match self {
            SpectrumShape::Flat => "flat",
            SpectrumShape::Decay => "decay-1/sqrt(i)",
            SpectrumShape::Spiked => "spiked",
        }
    }

    /// The first `count` singular values for a matrix with `m` columns.
    pub fn values(self, count: usize, m: usize) -> Vec<f64> {
        (1..=count)
            .map(|i| match self {
                SpectrumShape::Flat => 1.0,
                SpectrumShape::Decay => 1.0 / (i as f64).sqrt(),
                SpectrumShape::Spiked if i == 1 => 1.0,
                SpectrumShape::Spiked => 1.0 / (m as f64).sqrt(),
            })
            .collect()
    }
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    let data = DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal));
    DenseMatrix::new(data).expect("gaussian samples are finite")
}

/// Random `rows x cols` matrix with orthonormal columns (`cols <= rows`).
fn orthonormal_columns<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    let g = gaussian_matrix(rng, rows, cols).into_nalgebra();
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // Fix column signs so the factor is Haar distributed.
    let mut q = q.columns(0, cols).into_owned();
    for j in 0..cols {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `U diag(sigma) V^T` with random orthonormal `U`, `V` and the given shape.
pub fn matrix_with_spectrum<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, shape: SpectrumShape) -> DenseMatrix {
    let p = rows.min(cols);
    let sigma = shape.values(p, cols);
    let u = orthonormal_columns(rng, rows, p);
    let v = orthonormal_columns(rng, cols, p);
    let mut us = u;
    for (j, s) in sigma.iter().enumerate() {
        us.column_mut(j).scale_mut(*s);
    }
    DenseMatrix::new(us * v.transpose()).expect("finite product")
}
