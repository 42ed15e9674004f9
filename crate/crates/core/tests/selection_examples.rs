use rinv::linalg::sigma_min_subset;
use rinv::mixed_charpoly::expected_char_poly;
use rinv::oracle::brute_force_best_subset;
use rinv::polynomial::kth_largest_root;
use rinv::selection::greedy_select;
use rinv::{DenseMatrix, Polynomial, WeightVector};

fn three_columns() -> DenseMatrix {
    DenseMatrix::from_rows(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]]).unwrap()
}

#[test]
fn three_column_instance_beats_expected_root() {
    let a = three_columns();
    let w = WeightVector::ones(3);

    // AA^T has eigenvalues 3 and 1, ||W^-1||_F^2 = 3:
    // f = (1 - d/dx)(1 - d/dx / 3) x^2 = x^2 - 8x/3 + 2/3, lambda_2 = (4 - sqrt 10) / 3.
    let f = expected_char_poly(&a, &w, 2).unwrap();
    let want = Polynomial::new(vec![2.0 / 3.0, -8.0 / 3.0, 1.0]).unwrap();
    assert!(f.max_rel_deviation(&want) < 1e-14);
    let lambda = kth_largest_root(&f, 2).unwrap();
    assert!((lambda - (4.0 - 10f64.sqrt()) / 3.0).abs() < 1e-13);

    let res = greedy_select(&a, &w, 2, None).unwrap();
    let (best, best_value) = brute_force_best_subset(&a, &w, 2, 100).unwrap();
    assert!(res.sigma_min_sq >= lambda - 1e-12);
    assert!(res.sigma_min() <= best_value + 1e-12);

    // First-step scores by enumerating the one remaining draw:
    // f_s = sum_t p_t det[xI - a_s a_s^T - a_t a_t^T].
    let first_step: Vec<f64> = (0..3)
        .map(|s| {
            let leaf_sum = (0..3).fold(Polynomial::zero(), |acc, t| {
                let g = a.as_nalgebra();
                let c = g.column(s) * g.column(s).transpose() + g.column(t) * g.column(t).transpose();
                let leaf = rinv::linalg::char_poly(&DenseMatrix::new(c).unwrap()).unwrap();
                acc.add(&leaf.scale(1.0 / 3.0))
            });
            kth_largest_root(&leaf_sum, 2).unwrap()
        })
        .collect();
    assert!((res.lambda_trace[1] - first_step.iter().cloned().fold(f64::MIN, f64::max)).abs() < 1e-10);
    let first = first_step
        .iter()
        .enumerate()
        .fold(0, |b, (i, &v)| if v > first_step[b] + 1e-10 * v.abs() { i } else { b });
    assert_eq!(res.subset[0], first);
    assert_eq!(res.subset, best, "greedy reaches the optimum here");
}

#[test]
fn chosen_sigma_matches_independent_evaluation() {
    let a = three_columns();
    let w = WeightVector::new(vec![0.5, -2.0, 1.5]).unwrap();
    let res = greedy_select(&a, &w, 2, Some(2)).unwrap();
    let direct = sigma_min_subset(&a, &w, &res.subset).unwrap();
    assert!((direct * direct - res.sigma_min_sq).abs() < 1e-14);
    assert_eq!(res.bound_report.r_used, 2);
    assert!(res.is_certified());
}

#[test]
fn threshold_r_changes_only_the_certificate() {
    // Two strong directions and a weak one.
    let a = DenseMatrix::from_rows(&[
        vec![2.0, 0.1, 0.0, 1.0],
        vec![0.0, 1.5, 0.2, -1.0],
        vec![0.0, 0.0, 0.01, 0.0],
    ])
    .unwrap();
    let w = WeightVector::ones(4);
    let full = greedy_select(&a, &w, 2, None).unwrap();
    let thresholded = greedy_select(&a, &w, 2, Some(2)).unwrap();
    assert_eq!(full.subset, thresholded.subset);
    assert_eq!(full.bound_report.r_used, 3);
    assert!(thresholded.bound_report.rank_bound > full.bound_report.rank_bound);
    assert!(thresholded.is_certified() && full.is_certified());
}
