//! Dense matrices over exact rationals or `f64`, `l^p` norms and a Jacobi
//! eigensolver.

mod eig;
mod matrix;
mod norm;
mod scalar;

pub use eig::{sym_eig, SymEig};
pub use matrix::{block_diag, operator_residual, Matrix, OperatorMatrix};
pub use norm::{lp_norm, lp_norm_pow_p, PNorm, SpaceDescriptor, SpaceNorm};
pub use scalar::{
    best_rational_approximation, format_rational, integer, parse_rational, pow_u32, rational, rational_to_f64,
    Rational, Scalar, ScalarMode,
};
