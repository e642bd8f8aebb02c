//! Block-unitary N-dilation of a contraction on `l^2_d` (Schäffer form),
//! used as an independent reference for the Hilbert-space case.

use crate::dilation::{build_n_dilation, ConvexCombination, DEFAULT_LABEL};
use crate::error::{Error, Result};
use crate::isometry::{decompose_contraction, svd, DecompositionStrategy};
use crate::linalg::{operator_residual, rational_to_f64, sym_eig, Matrix, PNorm};

const NORM_SLACK: f64 = 1e-12;
const EIGEN_FLOOR: f64 = -1e-10;
/// Largest block count for which the full sign-pattern decomposition is
/// fed to the builder; above it the staircase split is used.
pub const SIGN_PRODUCT_BLOCK_BUDGET: usize = 1 << 16;

/// `U` on `N + 1` blocks of size `d`; `T^n` is the top-left block of `U^n`
/// for `n <= N`.
#[derive(Clone, Debug)]
pub struct UnitaryNDilation {
    pub u: Matrix<f64>,
    pub d: usize,
    pub n: usize,
}

impl UnitaryNDilation {
    /// Top-left `d x d` block of `U^k`.
    pub fn compress_power(&self, k: usize) -> Result<Matrix<f64>> {
        Ok(self.u.pow(k)?.block(0, 0, self.d, self.d))
    }

    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.u.transpose().matmul(&self.u).expect("square");
        operator_residual(&g, &Matrix::identity(g.rows())).expect("same shape")
    }
}

/// `(I - S)^(1/2)` for symmetric `0 <= S <= I`, eigenvalues clamped.
fn defect(s: &Matrix<f64>) -> Result<Matrix<f64>> {
    let d = s.rows();
    let m = Matrix::<f64>::identity(d).sub(s)?;
    let sym = m.add(&m.transpose())?.scale(&0.5);
    let e = sym_eig(&sym)?;
    if let Some(&low) = e.values.first() {
        if low < EIGEN_FLOOR {
            return Err(Error::NotAContraction { norm: (1.0 - low).sqrt(), bound: 1.0 });
        }
    }
    let roots: Vec<f64> = e.values.iter().map(|x| x.clamp(0.0, 1.0).sqrt()).collect();
    e.vectors.matmul(&Matrix::diagonal(&roots))?.matmul(&e.vectors.transpose())
}

/// Block rows: `[T, 0, .., 0, D_{T^T}]`, `[D_T, 0, .., 0, -T^T]`, then
/// the identity on the subdiagonal for rows `2..=N`. With `N = 1` this is
/// the 2x2 Halmos block matrix.
pub fn schaffer_dilation(t: &Matrix<f64>, n: usize) -> Result<UnitaryNDilation> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if !t.is_square() {
        return Err(Error::DimensionMismatch("oracle needs a square matrix".into()));
    }
    let d = t.rows();
    let top = svd(t)?.singular_values[0];
    if top > 1.0 + NORM_SLACK {
        return Err(Error::NotAContraction { norm: top, bound: 1.0 });
    }
    let tt = t.transpose();
    let d_t = defect(&tt.matmul(t)?)?;
    let d_tt = defect(&t.matmul(&tt)?)?;

    let mut u = Matrix::zeros(d * (n + 1), d * (n + 1));
    u.set_block(0, 0, t);
    u.set_block(0, n * d, &d_tt);
    u.set_block(d, 0, &d_t);
    u.set_block(d, n * d, &tt.scale(&-1.0));
    let id = Matrix::identity(d);
    for j in 2..=n {
        u.set_block(j * d, (j - 1) * d, &id);
    }
    Ok(UnitaryNDilation { u, d, n })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CrossValidateOptions {
    /// Snap the float weights to fractions with this denominator bound
    /// before building; `None` converts them exactly.
    pub weight_denominator: Option<u64>,
    pub strategy: Option<DecompositionStrategy>,
}

#[derive(Clone, Debug)]
pub struct CrossValidation {
    pub n: usize,
    pub strategy: DecompositionStrategy,
    pub terms: usize,
    pub weights: Vec<f64>,
    /// Largest `|w_float - w_used|`.
    pub weight_snap_error: f64,
    /// `||Q U^n J - T^n||_max`, `n = 0..=N`.
    pub block_residuals: Vec<f64>,
    /// `||Q U^n J - (sum w_i U_i)^n||_max` against the combination actually built.
    pub combination_residuals: Vec<f64>,
    /// `||P_0 V^n E_0 - T^n||_max`, `n = 0..=N`.
    pub oracle_residuals: Vec<f64>,
    /// Oracle residual at `n = N + 1`, outside the guarantee.
    pub oracle_beyond: f64,
    pub oracle_orthogonality: f64,
    pub pass: bool,
}

pub const BLOCK_TOLERANCE: f64 = 1e-6;
pub const ORACLE_TOLERANCE: f64 = 1e-9;

/// Builds an N-dilation of `T` in two ways (orthogonal decomposition plus
/// the block construction, and the Schäffer matrix) and compares both to
/// the powers of `T`.
pub fn cross_validate(t: &Matrix<f64>, n: usize, opts: &CrossValidateOptions) -> Result<CrossValidation> {
    let d = t.rows();
    if d == 0 || d > 5 {
        return Err(Error::CapExceeded { what: "cross-validation dimension", value: d as u128, cap: 5 });
    }
    if n == 0 || n > 4 {
        return Err(Error::InvalidParameter(format!("cross-validation needs 1 <= N <= 4, got {n}")));
    }
    let strategy = opts.strategy.unwrap_or_else(|| {
        let m = 1usize << d;
        let blocks = m.checked_pow(n as u32).and_then(|x| x.checked_mul(n));
        match blocks {
            Some(b) if b <= SIGN_PRODUCT_BLOCK_BUDGET => DecompositionStrategy::SignProduct,
            _ => DecompositionStrategy::Staircase,
        }
    });
    let dec = decompose_contraction(t, 1e-9, strategy)?;
    let p2 = PNorm::from_integer(2)?;
    let weights: Vec<f64> = dec.terms.iter().map(|x| x.weight).collect();
    let mats: Vec<Matrix<f64>> = dec.terms.iter().map(|x| x.matrix.clone()).collect();
    let labels: Vec<String> =
        dec.terms.iter().map(|x| x.signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()).collect();
    let labels_in_order = labels.clone();
    let combo = match opts.weight_denominator {
        None => ConvexCombination::from_float_weights(mats, &weights, labels, &p2)?,
        Some(q) => ConvexCombination::from_snapped_weights(mats, &weights, q, labels, &p2)?,
    };
    // snapping may drop a term entirely, so match weights by label
    let weight_snap_error = labels_in_order
        .iter()
        .zip(&weights)
        .map(|(label, w)| {
            let used =
                combo.labels().iter().position(|l| l == label).map_or(0.0, |i| rational_to_f64(&combo.weights()[i]));
            (w - used).abs()
        })
        .fold(0.0, f64::max);
    let triple = build_n_dilation(&combo, n, &p2)?;
    let built = combo.operator();
    let oracle = schaffer_dilation(t, n)?;

    let mut block_residuals = Vec::with_capacity(n + 1);
    let mut combination_residuals = Vec::with_capacity(n + 1);
    let mut oracle_residuals = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let power = t.pow(k)?;
        let compressed = triple.compress_power(DEFAULT_LABEL, k)?;
        block_residuals.push(operator_residual(&compressed, &power)?);
        combination_residuals.push(operator_residual(&compressed, &built.pow(k)?)?);
        oracle_residuals.push(operator_residual(&oracle.compress_power(k)?, &power)?);
    }
    let oracle_beyond = operator_residual(&oracle.compress_power(n + 1)?, &t.pow(n + 1)?)?;
    let block_curve = if opts.weight_denominator.is_some() { &combination_residuals } else { &block_residuals };
    let pass =
        block_curve.iter().all(|&r| r <= BLOCK_TOLERANCE) && oracle_residuals.iter().all(|&r| r <= ORACLE_TOLERANCE);
    Ok(CrossValidation {
        n,
        strategy,
        terms: combo.m(),
        weights: combo.weights().iter().map(rational_to_f64).collect(),
        weight_snap_error,
        block_residuals,
        combination_residuals,
        oracle_residuals,
        oracle_beyond,
        oracle_orthogonality: oracle.orthogonality_defect(),
        pass,
    })
}
