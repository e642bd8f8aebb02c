//! The cyclic group `C_N` acting on multi-indices `alpha: {1..N} -> {1..m}` by
//! precomposition, and formal word sums used to check the averaging identity
//! behind the block-cyclic dilation exactly.
//!
//! Everything is 0-based internally: the generator `sigma` of `C_N` is
//! `k -> (k + 1) mod N` and symbols run over `0..m`. Display helpers print
//! 1-based values.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{format_rational, integer, Rational};

/// A map `{0..N} -> {0..m}` stored as its value sequence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    values: Vec<usize>,
    m: usize,
}

impl MultiIndex {
    pub fn new(values: Vec<usize>, m: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("multi-index needs N >= 1".into()));
        }
        if m == 0 || values.iter().any(|&v| v >= m) {
            return Err(Error::InvalidParameter(format!("multi-index entries must lie in 0..{m}")));
        }
        Ok(Self { values, m })
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Position in the lexicographic enumeration (first entry most
    /// significant).
    pub fn rank(&self) -> usize {
        self.values.iter().fold(0, |acc, &v| acc * self.m + v)
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.values.iter().map(|v| v + 1).collect()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `sigma^power` in `C_N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CyclicPermutation {
    n: usize,
    power: usize,
}

impl CyclicPermutation {
    pub fn new(n: usize, power: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("cyclic group order must be positive".into()));
        }
        Ok(Self { n, power: power % n })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    pub fn generator(n: usize) -> Result<Self> {
        Self::new(n, 1)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn power(&self) -> usize {
        self.power
    }

    pub fn apply(&self, k: usize) -> usize {
        (k + self.power) % self.n
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &CyclicPermutation) -> CyclicPermutation {
        debug_assert_eq!(self.n, other.n);
        CyclicPermutation { n: self.n, power: (self.power + other.power) % self.n }
    }

    pub fn elements(n: usize) -> Result<Vec<CyclicPermutation>> {
        (0..n).map(|p| Self::new(n, p)).collect()
    }
}

/// All `m^N` multi-indices in lexicographic order. This is the canonical
/// block order of the dilation builders.
pub fn enumerate_indices(m: usize, n: usize) -> Result<Vec<MultiIndex>> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("enumerate_indices needs m >= 1 and N >= 1".into()));
    }
    let total = checked_power(m, n)?;
    Ok((0..total)
        .map(|mut r| {
            let mut values = vec![0; n];
            for slot in values.iter_mut().rev() {
                *slot = r % m;
                r /= m;
            }
            MultiIndex { values, m }
        })
        .collect())
}

pub(crate) fn checked_power(m: usize, n: usize) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..n {
        acc =
            acc.checked_mul(m).ok_or(Error::CapExceeded { what: "m^N", value: u128::MAX, cap: usize::MAX as u128 })?;
    }
    Ok(acc)
}

/// `alpha ∘ tau`.
pub fn act(alpha: &MultiIndex, tau: &CyclicPermutation) -> Result<MultiIndex> {
    if alpha.len() != tau.order() {
        return Err(Error::DimensionMismatch(format!(
            "multi-index of length {} acted on by C_{}",
            alpha.len(),
            tau.order()
        )));
    }
    let values = (0..alpha.len()).map(|k| alpha.values[tau.apply(k)]).collect();
    Ok(MultiIndex { values, m: alpha.m })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    /// Lexicographically sorted.
    pub members: Vec<MultiIndex>,
    /// Number of group elements fixing any member; `N / |orbit|`.
    pub stabilizer: usize,
}

impl Orbit {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    pub m: usize,
    pub n: usize,
    /// Ordered by smallest member.
    pub orbits: Vec<Orbit>,
}

impl OrbitPartition {
    pub fn total_size(&self) -> usize {
        self.orbits.iter().map(Orbit::size).sum()
    }

    /// Orbit-stabilizer: every orbit size times its stabilizer count is `N`.
    pub fn orbit_stabilizer_holds(&self) -> bool {
        self.orbits.iter().all(|o| self.n.is_multiple_of(o.size()) && o.size() * o.stabilizer == self.n)
    }
}

/// Orbits of `C_N` on the `m^N` multi-indices, with stabilizer sizes counted
/// directly (not derived from the orbit size).
pub fn orbit_partition(m: usize, n: usize) -> Result<OrbitPartition> {
    let all = enumerate_indices(m, n)?;
    let group = CyclicPermutation::elements(n)?;
    let mut seen = vec![false; all.len()];
    let mut orbits = Vec::new();
    for alpha in &all {
        if seen[alpha.rank()] {
            continue;
        }
        let mut members = Vec::new();
        let mut stabilizer = 0;
        for tau in &group {
            let beta = act(alpha, tau)?;
            if beta == *alpha {
                stabilizer += 1;
            }
            if !seen[beta.rank()] {
                seen[beta.rank()] = true;
                members.push(beta);
            }
        }
        members.sort();
        orbits.push(Orbit { members, stabilizer });
    }
    Ok(OrbitPartition { m, n, orbits })
}

/// `|lambda|_alpha = prod_k lambda[alpha(k)]`.
pub fn weight_of(alpha: &MultiIndex, lambda: &[Rational]) -> Result<Rational> {
    if lambda.len() != alpha.m {
        return Err(Error::DimensionMismatch(format!("{} weights for m = {}", lambda.len(), alpha.m)));
    }
    Ok(alpha.values.iter().fold(Rational::one(), |acc, &v| acc * &lambda[v]))
}

/// Formal sum of words over symbols `0..m` with exact rational coefficients.
/// The empty word stands for the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WordSum {
    terms: BTreeMap<Vec<usize>, Rational>,
}

impl WordSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(word: Vec<usize>) -> Self {
        let mut s = Self::zero();
        s.add_term(word, Rational::one());
        s
    }

    pub fn add_term(&mut self, word: Vec<usize>, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &WordSum) -> WordSum {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> WordSum {
        let mut out = WordSum::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c * s);
        }
        out
    }

    /// Concatenation product (non-commuting symbols).
    pub fn mul(&self, other: &WordSum) -> WordSum {
        let mut out = WordSum::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(w, c1 * c2);
            }
        }
        out
    }

    pub fn coefficient(&self, word: &[usize]) -> Rational {
        self.terms.get(word).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for WordSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let word: String = if w.is_empty() {
                    "1".into()
                } else {
                    w.iter().map(|s| format!("T{}", s + 1)).collect::<Vec<_>>().join("")
                };
                format!("{}*{}", format_rational(c), word)
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

fn check_word_sum_args(m: usize, n_cycle: usize, n: usize, lambda: &[Rational]) -> Result<()> {
    if m == 0 || n_cycle == 0 {
        return Err(Error::InvalidParameter("m and N must be positive".into()));
    }
    if n > n_cycle {
        return Err(Error::InvalidParameter(format!("word length n = {n} exceeds N = {n_cycle}")));
    }
    if lambda.len() != m {
        return Err(Error::DimensionMismatch(format!("{} weights for m = {m}", lambda.len())));
    }
    let total: Rational = lambda.iter().sum();
    if !total.is_one() {
        return Err(Error::InvalidCombination(format!("weights sum to {}", format_rational(&total))));
    }
    Ok(())
}

/// The word `alpha(sigma^shift(0)) .. alpha(sigma^shift(n-1))`.
fn shifted_prefix(alpha: &MultiIndex, shift: usize, n: usize) -> Vec<usize> {
    let len = alpha.len();
    (0..n).map(|j| alpha.values[(j + shift) % len]).collect()
}

/// `sum_alpha (|lambda|_alpha / N) sum_k prod_j T_{alpha(sigma^{k}(j))}`: the
/// compression `Q U^n J` of the block-cyclic dilation, written as a word sum.
pub fn lhs_word_sum(m: usize, n_cycle: usize, n: usize, lambda: &[Rational]) -> Result<WordSum> {
    check_word_sum_args(m, n_cycle, n, lambda)?;
    let inv_n = Rational::one() / integer(n_cycle as i64);
    let mut out = WordSum::zero();
    for alpha in enumerate_indices(m, n_cycle)? {
        let w = weight_of(&alpha, lambda)? * &inv_n;
        for k in 0..n_cycle {
            out.add_term(shifted_prefix(&alpha, k, n), w.clone());
        }
    }
    Ok(out)
}

/// `sum_alpha |lambda|_alpha prod_j T_{alpha(j)}`, i.e. `T^n` expanded.
pub fn rhs_word_sum(m: usize, n_cycle: usize, n: usize, lambda: &[Rational]) -> Result<WordSum> {
    check_word_sum_args(m, n_cycle, n, lambda)?;
    let mut out = WordSum::zero();
    for alpha in enumerate_indices(m, n_cycle)? {
        out.add_term(shifted_prefix(&alpha, 0, n), weight_of(&alpha, lambda)?);
    }
    Ok(out)
}

/// Orbit-restricted identity with integer coefficients:
/// `sum_{alpha in A} sum_k prod_j T_{alpha(sigma^k(j))} = N sum_{alpha in A} prod_j T_{alpha(j)}`.
pub fn check_orbit_identity(orbit: &Orbit, m: usize, n_cycle: usize, n: usize) -> Result<bool> {
    if n > n_cycle {
        return Err(Error::InvalidParameter(format!("word length n = {n} exceeds N = {n_cycle}")));
    }
    if orbit.members.iter().any(|a| a.len() != n_cycle || a.m != m) {
        return Err(Error::DimensionMismatch("orbit does not belong to (m, N)".into()));
    }
    let mut lhs = WordSum::zero();
    let mut rhs = WordSum::zero();
    let n_factor = integer(n_cycle as i64);
    for alpha in &orbit.members {
        for k in 0..n_cycle {
            lhs.add_term(shifted_prefix(alpha, k, n), Rational::one());
        }
        rhs.add_term(shifted_prefix(alpha, 0, n), n_factor.clone());
    }
    Ok(lhs == rhs)
}

/// Preimage counts of the multiplication map `C_N x C_N -> C_N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreimageReport {
    pub n: usize,
    /// `counts[g]` for `g = sigma^g`.
    pub counts: Vec<usize>,
}

impl PreimageReport {
    pub fn all_equal_to_order(&self) -> bool {
        self.counts.iter().all(|&c| c == self.n)
    }
}

pub fn double_coset_count(n: usize) -> Result<PreimageReport> {
    let group = CyclicPermutation::elements(n)?;
    let mut counts = vec![0; n];
    for tau in &group {
        for rho in &group {
            counts[tau.compose(rho).power()] += 1;
        }
    }
    Ok(PreimageReport { n, counts })
}
