use nalgebra::{DMatrix, DVector};

use super::Structure;

/// Below this reciprocal condition number a square system counts as singular.
const RCOND_MIN: f64 = 1e-13;

/// Solve `A x = b` for square `A`; `None` when `A` is (numerically) singular.
pub(crate) fn solve_square(a: DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let sv = a.singular_values();
    let max = sv.max();
    let min = sv.min();
    if max == 0.0 || min / max < RCOND_MIN {
        return None;
    }
    a.lu().solve(b)
}

/// Minimum-norm least-squares solution of `A x = b`.
pub(crate) fn least_squares(a: DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = a.svd(true, true);
    let eps = svd.singular_values.max() * 1e-12;
    svd.solve(b, eps).ok()
}

/// Matrix of `y -> x * y` over the flat basis: `L[w][q] = sum_p x_p C^w_{p,q}`.
pub(crate) fn left_mul_matrix(s: &Structure, x: &[f64]) -> DMatrix<f64> {
    let n = s.n;
    let mut l = DMatrix::zeros(n, n);
    for (p, &xp) in x.iter().enumerate() {
        if xp == 0.0 {
            continue;
        }
        for q in 0..n {
            for &(w, c) in s.product(p, q) {
                l[(w, q)] += xp * c;
            }
        }
    }
    l
}

/// Matrix of `y -> y * x`: `R[w][q] = sum_p x_p C^w_{q,p}`.
pub(crate) fn right_mul_matrix(s: &Structure, x: &[f64]) -> DMatrix<f64> {
    let n = s.n;
    let mut r = DMatrix::zeros(n, n);
    for (p, &xp) in x.iter().enumerate() {
        if xp == 0.0 {
            continue;
        }
        for q in 0..n {
            for &(w, c) in s.product(q, p) {
                r[(w, q)] += xp * c;
            }
        }
    }
    r
}
