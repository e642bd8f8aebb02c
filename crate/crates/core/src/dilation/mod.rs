//! Explicit `(J, U, Q)` triples with `Q U_{w_1} .. U_{w_n} J = T_{w_1} .. T_{w_n}`
//! for words up to a certified length, and a checker for that identity.
//!
//! Block layout of the N-dilation: multi-indices `alpha` in lexicographic
//! order, and inside each `alpha` the `N` cyclic coordinates.

mod block;
mod builders;
mod combination;
mod scaled_map;
mod triple;
mod verify;

pub use block::{BlockPermutation, DENSE_DIM_CAP};
pub use builders::{
    build_n_dilation, build_simultaneous_n_dilation, shift_dilation, trivial_dilation, with_zero_target, zero_augment,
    DEFAULT_LABEL, MAX_BLOCKS, ZERO_LABEL,
};
pub use combination::{equalize_family, rationalize_weights, rationalize_weights_to, ConvexCombination};
pub use scaled_map::{MapKind, ScaledBlockMap};
pub use triple::{DilationTriple, Guarantee};
pub use verify::{
    target_product, verify_dilation, verify_words, VerificationReport, VerifyOptions, WordCheck, DEFAULT_SEED,
    DEFAULT_TOLERANCE, DEFAULT_WORD_CAP,
};

#[cfg(test)]
mod tests;
