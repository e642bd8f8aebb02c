//! Finite-dimensional dilation constructions.
//!
//! Operators are dense square matrices over either exact rationals or
//! `f64`. The builders in [`dilation`] produce a [`DilationTriple`] `(J, U, Q)`
//! with `Q U_{w_1} .. U_{w_n} J = T_{w_1} .. T_{w_n}` for every word up to a
//! certified length, and [`verify_dilation`] checks that equality directly.
//!
//! Supporting modules cover the cyclic group action used by the block
//! construction ([`group_action`]), isometries of `l^p_d` and orthogonal
//! decompositions of contractions ([`isometry`]), exact convex-hull membership
//! ([`hull`]) and a classical block-unitary dilation used as an independent
//! reference on Hilbert space ([`oracle`]).

pub mod dilation;
pub mod error;
pub mod group_action;
pub mod hull;
pub mod isometry;
pub mod linalg;
pub mod oracle;

pub use dilation::{
    build_n_dilation, build_simultaneous_n_dilation, rationalize_weights, shift_dilation, trivial_dilation,
    verify_dilation, zero_augment, BlockPermutation, ConvexCombination, DilationTriple, Guarantee, ScaledBlockMap,
    VerificationReport, VerifyOptions, ZERO_LABEL,
};
pub use error::{Error, Result};
pub use group_action::{CyclicPermutation, MultiIndex, OrbitPartition, WordSum};
pub use linalg::{Matrix, OperatorMatrix, PNorm, Rational, Scalar, ScalarMode, SpaceDescriptor};
