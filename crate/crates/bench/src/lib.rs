//! Shared inputs for the benchmarks.

use dilation_core::dilation::ConvexCombination;
use dilation_core::isometry::all_signed_permutations;
use dilation_core::linalg::{rational, Matrix, PNorm, Rational};

/// `m` distinct signed permutations of size `d` with weights `1..=m`
/// normalized, in a fixed order.
pub fn combination(d: usize, m: usize, p: &PNorm) -> ConvexCombination<Rational> {
    let all = all_signed_permutations(d, 5).expect("small dimension");
    let step = (all.len() / m).max(1);
    let isos: Vec<Matrix<Rational>> = (0..m).map(|i| all[(i * step + 1) % all.len()].to_matrix()).collect();
    let total = (m * (m + 1) / 2) as i64;
    let weights = (1..=m as i64).map(|i| rational(i, total)).collect();
    ConvexCombination::new(isos, weights, p).expect("valid combination")
}

/// A fixed strict contraction in float form (scaled by its Frobenius norm).
pub fn contraction(d: usize) -> Matrix<f64> {
    let data: Vec<f64> = (0..d * d).map(|k| ((k * 7 + 3) % 11) as f64 / 11.0 - 0.5).collect();
    let frob = data.iter().map(|x| x * x).sum::<f64>().sqrt();
    Matrix::new(d, d, data).expect("square").scale(&(0.9 / frob.max(1e-12)))
}

/// `1/2` on the diagonal and `-1/4` just below it, cyclically: every
/// column has l^1 norm `3/4`.
pub fn l1_contraction(d: usize) -> Matrix<Rational> {
    let mut t = Matrix::zeros(d, d);
    for j in 0..d {
        let mut col = vec![rational(0, 1); d];
        col[j] = &col[j] + &rational(1, 2);
        col[(j + 1) % d] = &col[(j + 1) % d] - &rational(1, 4);
        for (i, x) in col.into_iter().enumerate() {
            t[(i, j)] = x;
        }
    }
    t
}
