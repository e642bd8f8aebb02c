//! Invertible isometries of `l^p_d` and orthogonal decompositions of
//! Hilbert-space contractions.
//!
//! On `l^p_d` with real scalars and `p != 2` the invertible isometries are
//! exactly the signed permutation matrices; for `p = 2` they are the
//! orthogonal matrices. Every contraction on `l^2_d` is a convex combination
//! of orthogonal matrices, obtained here from a singular value decomposition.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{operator_residual, sym_eig, Matrix, PNorm, Scalar};

pub const DEFAULT_PERMUTATION_CAP: usize = 5;
const FLOAT_ISOMETRY_TOL: f64 = 1e-10;
const DROPPED_WEIGHT: f64 = 1e-14;

/// `perm[i] = j` means row `i` has its nonzero entry in column `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let d = perm.len();
        if d == 0 || signs.len() != d {
            return Err(Error::DimensionMismatch("permutation and sign lengths differ".into()));
        }
        let mut hit = vec![false; d];
        for &j in &perm {
            if j >= d || hit[j] {
                return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation")));
            }
            hit[j] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter("signs must be +1 or -1".into()));
        }
        Ok(Self { perm, signs })
    }

    pub fn unsigned(perm: Vec<usize>) -> Result<Self> {
        let d = perm.len();
        Self::new(perm, vec![1; d])
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn is_positive(&self) -> bool {
        self.signs.iter().all(|&s| s == 1)
    }

    pub fn is_identity(&self) -> bool {
        self.is_positive() && self.perm.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn to_matrix<S: Scalar>(&self) -> Matrix<S> {
        let d = self.dim();
        let mut m = Matrix::zeros(d, d);
        for (i, (&j, &s)) in self.perm.iter().zip(&self.signs).enumerate() {
            m[(i, j)] = S::from_i64(s as i64);
        }
        m
    }

    /// Reads a signed permutation back from its matrix, if it is one.
    pub fn from_matrix<S: Scalar>(m: &Matrix<S>, tol: f64) -> Option<Self> {
        if !m.is_square() {
            return None;
        }
        let d = m.rows();
        let mut perm = Vec::with_capacity(d);
        let mut signs = Vec::with_capacity(d);
        for i in 0..d {
            let mut found = None;
            for j in 0..d {
                let x = &m[(i, j)];
                if x.is_negligible(tol) {
                    continue;
                }
                if found.is_some() {
                    return None;
                }
                if (x.clone() - S::one()).is_negligible(tol) {
                    found = Some((j, 1));
                } else if (x.clone() + S::one()).is_negligible(tol) {
                    found = Some((j, -1));
                } else {
                    return None;
                }
            }
            let (j, s) = found?;
            perm.push(j);
            signs.push(s);
        }
        Self::new(perm, signs).ok()
    }

    /// `id`, `swap` (for the 2x2 transposition) or one-line notation such as
    /// `[2,-3,1]` (1-based, sign on the image).
    pub fn label(&self) -> String {
        if self.is_identity() {
            return "id".into();
        }
        if self.dim() == 2 && self.is_positive() {
            return "swap".into();
        }
        let parts: Vec<String> = self
            .perm
            .iter()
            .zip(&self.signs)
            .map(|(&j, &s)| if s < 0 { format!("-{}", j + 1) } else { format!("{}", j + 1) })
            .collect();
        format!("[{}]", parts.join(","))
    }
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn is_signed_permutation<S: Scalar>(t: &Matrix<S>) -> bool {
    SignedPermutation::from_matrix(t, FLOAT_ISOMETRY_TOL).is_some()
}

/// Invertible isometry test on `l^p_d`: orthogonality for `p = 2`, the
/// signed-permutation criterion otherwise.
pub fn is_lp_isometry<S: Scalar>(t: &Matrix<S>, p: &PNorm) -> bool {
    if !t.is_square() {
        return false;
    }
    if !p.is_two() {
        return is_signed_permutation(t);
    }
    let gram = match t.transpose().matmul(t) {
        Ok(g) => g,
        Err(_) => return false,
    };
    let id = Matrix::<S>::identity(t.rows());
    match gram.sub(&id) {
        Ok(diff) => diff.data().iter().all(|x| x.is_negligible(FLOAT_ISOMETRY_TOL)),
        Err(_) => false,
    }
}

fn factorial(d: usize) -> u128 {
    (1..=d as u128).product()
}

/// All `d!` permutations in lexicographic order of their one-line notation.
pub fn all_permutations(d: usize, cap: usize) -> Result<Vec<SignedPermutation>> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if d > cap {
        return Err(Error::CapExceeded { what: "dimension", value: d as u128, cap: cap as u128 });
    }
    let mut out = Vec::with_capacity(factorial(d) as usize);
    let mut current: Vec<usize> = (0..d).collect();
    loop {
        out.push(SignedPermutation::unsigned(current.clone())?);
        // next permutation in lexicographic order
        let Some(i) = (0..d.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..d).rev().find(|&j| current[j] > current[i]).expect("successor exists");
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    Ok(out)
}

/// All `2^d d!` signed permutations: permutations in lexicographic order,
/// each followed through its sign patterns (binary order, `+` first).
pub fn all_signed_permutations(d: usize, cap: usize) -> Result<Vec<SignedPermutation>> {
    let perms = all_permutations(d, cap)?;
    let mut out = Vec::with_capacity(perms.len() << d);
    for p in perms {
        for mask in 0u32..(1 << d) {
            let signs = (0..d).map(|k| if mask >> (d - 1 - k) & 1 == 1 { -1 } else { 1 }).collect();
            out.push(SignedPermutation::new(p.perm.clone(), signs)?);
        }
    }
    Ok(out)
}

/// `T = U diag(sigma) V^T`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Matrix<f64>,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub v: Matrix<f64>,
}

impl Svd {
    pub fn reconstruct(&self) -> Matrix<f64> {
        self.u
            .matmul(&Matrix::diagonal(&self.singular_values))
            .and_then(|us| us.matmul(&self.v.transpose()))
            .expect("square factors")
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Removes the components along `basis` (twice, for stability).
fn orthogonalize(mut r: Vec<f64>, basis: &[Vec<f64>]) -> Vec<f64> {
    for _ in 0..2 {
        for u in basis {
            let c = dot(u, &r);
            for (x, y) in r.iter_mut().zip(u) {
                *x -= c * y;
            }
        }
    }
    r
}

/// SVD of a square matrix through the eigen-decomposition of `T^T T`.
/// Left singular vectors come from Gram-Schmidt on the columns of `T V`;
/// rank-deficient directions are completed with standard basis vectors.
pub fn svd(t: &Matrix<f64>) -> Result<Svd> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch("svd expects a square matrix".into()));
    }
    let d = t.rows();
    if d > 16 {
        return Err(Error::CapExceeded { what: "svd dimension", value: d as u128, cap: 16 });
    }
    let gram = t.transpose().matmul(t)?;
    let eig = sym_eig(&gram)?;
    let scale = t.max_abs().max(1.0);

    let mut v_cols: Vec<Vec<f64>> = (0..d).rev().map(|i| eig.vectors.column(i)).collect();
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut sigma = Vec::with_capacity(d);
    for v in &v_cols {
        let w = t.apply(v)?;
        let r = orthogonalize(w, &u_cols);
        let n = norm(&r);
        if n > 1e-13 * scale {
            u_cols.push(r.iter().map(|x| x / n).collect());
            sigma.push(n);
        } else {
            u_cols.push(complete_basis(&u_cols, d));
            sigma.push(0.0);
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let sigma: Vec<f64> = order.iter().map(|&i| sigma[i]).collect();
    let u_cols: Vec<Vec<f64>> = order.iter().map(|&i| u_cols[i].clone()).collect();
    v_cols = order.iter().map(|&i| v_cols[i].clone()).collect();

    Ok(Svd { u: from_columns(&u_cols), singular_values: sigma, v: from_columns(&v_cols) })
}

fn complete_basis(basis: &[Vec<f64>], d: usize) -> Vec<f64> {
    let mut best = (0.0, vec![0.0; d]);
    for k in 0..d {
        let mut e = vec![0.0; d];
        e[k] = 1.0;
        let r = orthogonalize(e, basis);
        let n = norm(&r);
        if n > best.0 {
            best = (n, r);
        }
    }
    let (n, r) = best;
    r.into_iter().map(|x| x / n).collect()
}

fn from_columns(cols: &[Vec<f64>]) -> Matrix<f64> {
    let d = cols.len();
    let mut m = Matrix::zeros(d, d);
    for (j, c) in cols.iter().enumerate() {
        for (i, x) in c.iter().enumerate() {
            m[(i, j)] = *x;
        }
    }
    m
}

/// How the diagonal of singular values is split into sign patterns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DecompositionStrategy {
    /// Every sign pattern `s` with weight `prod_k (1 + s_k sigma_k) / 2`;
    /// at most `2^d` terms.
    #[default]
    SignProduct,
    /// Nested patterns `(+..+, -..-)` with weights given by consecutive
    /// differences of `(1 + sigma_k) / 2`; at most `d + 1` terms.
    Staircase,
}

#[derive(Clone, Debug)]
pub struct DecompositionTerm {
    pub weight: f64,
    /// Sign pattern applied to the singular values.
    pub signs: Vec<i8>,
    /// `U diag(signs) V^T`.
    pub matrix: Matrix<f64>,
}

/// `T = sum_i w_i U_i` with orthogonal `U_i` and positive weights summing
/// to one.
#[derive(Clone, Debug)]
pub struct OrthogonalDecomposition {
    pub terms: Vec<DecompositionTerm>,
    pub singular_values: Vec<f64>,
    pub reconstruction_residual: f64,
}

impl OrthogonalDecomposition {
    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    pub fn reconstruct(&self) -> Matrix<f64> {
        let d = self.terms[0].matrix.rows();
        self.terms.iter().fold(Matrix::zeros(d, d), |acc, t| acc.add(&t.matrix.scale(&t.weight)).expect("same shape"))
    }

    pub fn max_orthogonality_defect(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let g = t.matrix.transpose().matmul(&t.matrix).expect("square");
                operator_residual(&g, &Matrix::identity(g.rows())).expect("same shape")
            })
            .fold(0.0, f64::max)
    }
}

/// Decomposes a contraction on `l^2_d` into a convex combination of
/// orthogonal matrices. Singular values up to `1 + tol` are clamped to 1.
pub fn decompose_contraction(
    t: &Matrix<f64>,
    tol: f64,
    strategy: DecompositionStrategy,
) -> Result<OrthogonalDecomposition> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch("decompose_contraction expects a square matrix".into()));
    }
    let d = t.rows();
    if d > 8 {
        return Err(Error::CapExceeded { what: "decomposition dimension", value: d as u128, cap: 8 });
    }
    let svd = svd(t)?;
    let top = svd.singular_values[0];
    if top > 1.0 + tol {
        return Err(Error::NotAContraction { norm: top, bound: 1.0 });
    }
    let sigma: Vec<f64> = svd.singular_values.iter().map(|s| s.clamp(0.0, 1.0)).collect();

    let patterns: Vec<(f64, Vec<i8>)> = match strategy {
        DecompositionStrategy::SignProduct => (0u32..(1 << d))
            .map(|mask| {
                let signs: Vec<i8> = (0..d).map(|k| if mask >> (d - 1 - k) & 1 == 1 { -1 } else { 1 }).collect();
                let w = signs.iter().zip(&sigma).map(|(&s, &x)| (1.0 + s as f64 * x) / 2.0).product();
                (w, signs)
            })
            .collect(),
        DecompositionStrategy::Staircase => {
            // sigma is descending, so x_k = (1 + sigma_k)/2 is too
            let x: Vec<f64> = sigma.iter().map(|s| (1.0 + s) / 2.0).collect();
            (0..=d)
                .map(|k| {
                    let upper = if k == 0 { 1.0 } else { x[k - 1] };
                    let lower = if k == d { 0.0 } else { x[k] };
                    let signs = (0..d).map(|i| if i < k { 1 } else { -1 }).collect();
                    (upper - lower, signs)
                })
                .collect()
        }
    };

    let kept: Vec<(f64, Vec<i8>)> = patterns.into_iter().filter(|(w, _)| *w >= DROPPED_WEIGHT).collect();
    let total: f64 = kept.iter().map(|(w, _)| w).sum();
    let vt = svd.v.transpose();
    let terms = kept
        .into_iter()
        .map(|(w, signs)| {
            let s: Vec<f64> = signs.iter().map(|&x| x as f64).collect();
            let matrix = svd.u.matmul(&Matrix::diagonal(&s))?.matmul(&vt)?;
            Ok(DecompositionTerm { weight: w / total, signs, matrix })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = OrthogonalDecomposition { terms, singular_values: sigma, reconstruction_residual: 0.0 };
    out.reconstruction_residual = operator_residual(&out.reconstruct(), t)?;
    Ok(out)
}
