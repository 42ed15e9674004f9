//! Deterministic column subset selection with lower bounds on the smallest
//! singular value.
//!
//! Given `A` (`n x m`) and nonzero column weights `W = diag(w)`, the greedy
//! search in [`selection`] picks `k` columns `S` such that
//! `sigma_min(A_S W_S)^2` is at least the `k`-th largest root of the expected
//! characteristic polynomial of a random column draw. That root in turn
//! dominates two closed-form bounds: one in terms of the top `r` singular
//! values, one in terms of the Schatten-4 stable rank.
//!
//! Column indices are 0-based throughout the library; the CLI reports them
//! 1-based.
//!
//! ```
//! use rinv::{greedy_select, DenseMatrix, WeightVector};
//!
//! let a = DenseMatrix::identity(2);
//! let res = greedy_select(&a, &WeightVector::ones(2), 2, None).unwrap();
//! assert_eq!(res.subset, vec![0, 1]);
//! assert!(res.is_certified());
//! ```

pub mod cli;
pub mod error;
pub mod generate;
pub mod linalg;
pub mod mixed_charpoly;
pub mod oracle;
pub mod polynomial;
pub mod selection;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, WeightVector};
pub use mixed_charpoly::{expected_char_poly, partial_assignment_poly, AssignmentPrefix, BivariatePoly};
pub use polynomial::{Polynomial, RootList};
pub use selection::{greedy_select, BoundReport, SelectionResult, Tolerances};
