use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::group_action::{checked_power, enumerate_indices, weight_of};
use crate::isometry::is_lp_isometry;
use crate::linalg::{Matrix, PNorm, Rational, Scalar, ScalarMode, SpaceDescriptor, SpaceNorm};

use super::block::BlockPermutation;
use super::combination::ConvexCombination;
use super::scaled_map::{MapKind, ScaledBlockMap};
use super::triple::{DilationTriple, Guarantee};

/// Label of the single dilating operator produced by [`build_n_dilation`].
pub const DEFAULT_LABEL: &str = "T";
/// Label of the zero operator added by [`zero_augment`].
pub const ZERO_LABEL: &str = "0";
/// Refuse constructions with more blocks than this.
pub const MAX_BLOCKS: usize = 1 << 20;

fn unit() -> Rational {
    Rational::one()
}

/// `Y = X`, `J = Q = I`, `U_T = T`. Valid for words of any length.
pub fn trivial_dilation<S: Scalar>(isometries: &[(String, Matrix<S>)], p: &PNorm) -> Result<DilationTriple<S>> {
    let Some((_, first)) = isometries.first() else {
        return Err(Error::Empty("isometry set"));
    };
    let d = first.rows();
    let mut operators = BTreeMap::new();
    for (label, t) in isometries {
        if t.rows() != d || !is_lp_isometry(t, p) {
            return Err(Error::NotAnIsometry(format!("{label} on l^{p}_{d}")));
        }
        if operators.insert(label.clone(), BlockPermutation::new(d, vec![0], vec![Some(0)], vec![t.clone()])?).is_some()
        {
            return Err(Error::InvalidParameter(format!("duplicate label {label}")));
        }
    }
    DilationTriple::new(
        SpaceDescriptor::new(d, SpaceNorm::Lp(p.clone()), format!("l^{p}_{d}, Y = X"))?,
        ScaledBlockMap::uniform_identity(MapKind::Embed, d, vec![unit()])?,
        ScaledBlockMap::uniform_identity(MapKind::Readout, d, vec![unit()])?,
        operators,
        Guarantee::Infinite,
    )
}

fn block_count(m: usize, n: usize) -> Result<usize> {
    let blocks = checked_power(m, n)?.checked_mul(n).ok_or(Error::CapExceeded {
        what: "blocks",
        value: u128::MAX,
        cap: MAX_BLOCKS as u128,
    })?;
    if blocks > MAX_BLOCKS {
        return Err(Error::CapExceeded { what: "blocks", value: blocks as u128, cap: MAX_BLOCKS as u128 });
    }
    Ok(blocks)
}

fn check_family_isometries<S: Scalar>(combo: &ConvexCombination<S>, p: &PNorm) -> Result<()> {
    for (t, label) in combo.isometries().iter().zip(combo.labels()) {
        if !is_lp_isometry(t, p) {
            return Err(Error::NotAnIsometry(format!("{label} on l^{p}")));
        }
    }
    Ok(())
}

/// Block `(alpha, k)` sits at `rank(alpha) * N + k`; output block `k` of the
/// `alpha`-part is `T_{alpha(k)}` applied to input block `k + 1 mod N`.
fn cyclic_block_operator<S: Scalar>(m: usize, n: usize, pool: Vec<Matrix<S>>) -> Result<BlockPermutation<S>> {
    let d = pool[0].rows();
    let indices = enumerate_indices(m, n)?;
    let mut sources = Vec::with_capacity(indices.len() * n);
    let mut factors = Vec::with_capacity(indices.len() * n);
    for alpha in &indices {
        let base = alpha.rank() * n;
        for k in 0..n {
            sources.push(base + (k + 1) % n);
            factors.push(Some(alpha.values()[k]));
        }
    }
    BlockPermutation::new(d, sources, factors, pool)
}

fn structure(p: &PNorm, n: usize, m: usize, d: usize) -> String {
    format!("l^{p} sum of {n}*{m}^{n} copies of X, dim X = {d}")
}

/// N-dilation of a convex combination `T = sum lambda_k T_k` of isometries
/// of `l^p_d`, on `Y = l^p_{N m^N}(X)`.
///
/// `J` puts `(|lambda|_alpha / N)^(1/p) x` in every block of the
/// `alpha`-part and `Q` reads back with exponent `1/q`; the bases are
/// stored, not evaluated.
pub fn build_n_dilation<S: Scalar>(combo: &ConvexCombination<S>, n: usize, p: &PNorm) -> Result<DilationTriple<S>> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    check_family_isometries(combo, p)?;
    let (m, d) = (combo.m(), combo.dim());
    let blocks = block_count(m, n)?;
    let u = cyclic_block_operator(m, n, combo.isometries().to_vec())?;
    let big_n = Rational::from_integer(BigInt::from(n));
    let mut bases = Vec::with_capacity(blocks);
    for alpha in enumerate_indices(m, n)? {
        let b = weight_of(&alpha, combo.weights())? / &big_n;
        bases.extend(std::iter::repeat_n(b, n));
    }
    DilationTriple::new(
        SpaceDescriptor::new(blocks * d, SpaceNorm::Lp(p.clone()), structure(p, n, m, d))?,
        ScaledBlockMap::uniform_identity(MapKind::Embed, d, bases.clone())?,
        ScaledBlockMap::uniform_identity(MapKind::Readout, d, bases)?,
        BTreeMap::from([(DEFAULT_LABEL.to_string(), u)]),
        Guarantee::Finite(n),
    )
}

/// Simultaneous N-dilation of a family of equal-weight combinations sharing
/// one `m`: one `(J, Q)` with base `1 / (N m^N)` everywhere and one `U_F`
/// per member.
pub fn build_simultaneous_n_dilation<S: Scalar>(
    family: &[(String, ConvexCombination<S>)],
    n: usize,
    p: &PNorm,
) -> Result<DilationTriple<S>> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let Some((_, first)) = family.first() else {
        return Err(Error::Empty("family"));
    };
    let (m, d) = (first.m(), first.dim());
    let mut operators = BTreeMap::new();
    for (name, combo) in family {
        if combo.m() != m {
            return Err(Error::InvalidCombination(format!("{name} has {} terms, expected {m}", combo.m())));
        }
        if combo.dim() != d {
            return Err(Error::DimensionMismatch(format!("{name} acts on dimension {}", combo.dim())));
        }
        if !combo.is_equal_weight() {
            return Err(Error::InvalidCombination(format!("{name} is not in equal-weight form")));
        }
        check_family_isometries(combo, p)?;
        let u = cyclic_block_operator(m, n, combo.isometries().to_vec())?;
        if operators.insert(name.clone(), u).is_some() {
            return Err(Error::InvalidParameter(format!("duplicate label {name}")));
        }
    }
    let blocks = block_count(m, n)?;
    let base = Rational::new(BigInt::one(), BigInt::from(blocks));
    DilationTriple::new(
        SpaceDescriptor::new(blocks * d, SpaceNorm::Lp(p.clone()), structure(p, n, m, d))?,
        ScaledBlockMap::uniform_identity(MapKind::Embed, d, vec![base.clone(); blocks])?,
        ScaledBlockMap::uniform_identity(MapKind::Readout, d, vec![base; blocks])?,
        operators,
        Guarantee::Finite(n),
    )
}

/// Adds the zero operator to a family: `Y~ = l^p_{N+1}(Y)`, `J~` writes the
/// first copy, `Q~` reads it, `V_U` acts copywise and `V_0` cycles the
/// copies `(y_1, .., y_{N+1}) -> (y_2, .., y_{N+1}, y_1)`.
///
/// Targets for verification must map [`ZERO_LABEL`] to the zero matrix. For
/// a bare set of isometries pass the output of [`trivial_dilation`].
pub fn zero_augment<S: Scalar>(inner: &DilationTriple<S>, n: usize) -> Result<DilationTriple<S>> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if inner.operators().contains_key(ZERO_LABEL) {
        return Err(Error::InvalidParameter(format!("label {ZERO_LABEL} is already in use")));
    }
    let copies = n + 1;
    let k = inner.embed().num_blocks();
    let bd = inner.embed().block_dim();
    let blocks = k.checked_mul(copies).filter(|&b| b <= MAX_BLOCKS).ok_or(Error::CapExceeded {
        what: "blocks",
        value: (k as u128) * (copies as u128),
        cap: MAX_BLOCKS as u128,
    })?;

    let mut operators = BTreeMap::new();
    for (label, u) in inner.operators() {
        let mut sources = Vec::with_capacity(blocks);
        let mut factors = Vec::with_capacity(blocks);
        for c in 0..copies {
            for i in 0..k {
                sources.push(c * k + u.source(i));
                factors.push(u.factor_index(i));
            }
        }
        operators.insert(label.clone(), BlockPermutation::new(bd, sources, factors, u.pool().to_vec())?);
    }
    let cycle = (0..copies).flat_map(|c| (0..k).map(move |i| ((c + 1) % copies) * k + i)).collect();
    operators.insert(ZERO_LABEL.to_string(), BlockPermutation::permutation(bd, cycle)?);

    let first_copy = |map: &ScaledBlockMap<S>, kind| {
        let blocks = (0..blocks).map(|j| if j < k { map.block(j).cloned() } else { None }).collect();
        let bases = (0..copies).flat_map(|_| map.bases().iter().cloned()).collect();
        ScaledBlockMap::new(kind, map.base_dim(), bd, blocks, bases)
    };
    let guarantee = match inner.guarantee() {
        Guarantee::Finite(g) => Guarantee::Finite(g.min(n)),
        Guarantee::Infinite => Guarantee::Finite(n),
    };
    let space = SpaceDescriptor::new(
        blocks * bd,
        inner.space().norm.clone(),
        format!("{} copies of ({})", copies, inner.space().structure),
    )?;
    DilationTriple::new(
        space,
        first_copy(inner.embed(), MapKind::Embed)?,
        first_copy(inner.readout(), MapKind::Readout)?,
        operators,
        guarantee,
    )
}

/// Targets extended by the zero matrix under [`ZERO_LABEL`].
pub fn with_zero_target<S: Scalar>(targets: &BTreeMap<String, Matrix<S>>, d: usize) -> BTreeMap<String, Matrix<S>> {
    let mut out = targets.clone();
    out.insert(ZERO_LABEL.to_string(), Matrix::zeros(d, d));
    out
}

/// Cyclic window of the shift dilation of an `l^1` contraction: `W + 1`
/// blocks, `U` shifts blocks forward, `J` writes block 0 and
/// `Q(x_0, .., x_W) = sum_k T^k x_k`.
pub fn shift_dilation<S: Scalar>(t: &Matrix<S>, window: usize) -> Result<DilationTriple<S>> {
    if window == 0 {
        return Err(Error::InvalidParameter("window must be at least 1".into()));
    }
    if !t.is_square() {
        return Err(Error::DimensionMismatch("shift dilation needs a square matrix".into()));
    }
    let norm = t.max_abs_column_sum();
    let over = match S::MODE {
        ScalarMode::Exact => norm > S::one(),
        ScalarMode::Float => norm.to_f64() > 1.0 + 1e-12,
    };
    if over {
        return Err(Error::NotAContraction { norm: norm.to_f64(), bound: 1.0 });
    }
    let d = t.rows();
    let blocks = window + 1;
    if blocks > MAX_BLOCKS {
        return Err(Error::CapExceeded { what: "blocks", value: blocks as u128, cap: MAX_BLOCKS as u128 });
    }
    let shift = BlockPermutation::permutation(d, (0..blocks).map(|i| (i + window) % blocks).collect())?;
    let embed_blocks = (0..blocks).map(|i| (i == 0).then(|| Matrix::identity(d))).collect();
    let mut readout_blocks = Vec::with_capacity(blocks);
    let mut power = Matrix::identity(d);
    for _ in 0..blocks {
        let next = power.matmul(t)?;
        readout_blocks.push(Some(power));
        power = next;
    }
    DilationTriple::new(
        SpaceDescriptor::new(blocks * d, SpaceNorm::L1, format!("l^1 sum of {blocks} copies of X, dim X = {d}"))?,
        ScaledBlockMap::new(MapKind::Embed, d, d, embed_blocks, vec![unit(); blocks])?,
        ScaledBlockMap::new(MapKind::Readout, d, d, readout_blocks, vec![unit(); blocks])?,
        BTreeMap::from([(DEFAULT_LABEL.to_string(), shift)]),
        Guarantee::Finite(window),
    )
}
