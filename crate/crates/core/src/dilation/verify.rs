use std::collections::{BTreeMap, BTreeSet};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Scalar, ScalarMode};

use super::triple::{DilationTriple, Guarantee};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_WORD_CAP: usize = 10_000;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub max_len: usize,
    /// Float mode only; exact mode always demands a zero residual.
    pub tolerance: f64,
    /// Beyond this many words, a seeded sample of this size is checked.
    pub word_cap: usize,
    pub seed: u64,
}

impl VerifyOptions {
    pub fn new(max_len: usize) -> Self {
        Self { max_len, tolerance: DEFAULT_TOLERANCE, word_cap: DEFAULT_WORD_CAP, seed: DEFAULT_SEED }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WordCheck {
    pub word: Vec<String>,
    /// Largest absolute entry of `Q U_w J - T_w`.
    pub residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub mode: ScalarMode,
    pub checks: Vec<WordCheck>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// False when some checked word is longer than the triple's guarantee.
    pub in_contract: bool,
    pub guarantee: Guarantee,
    /// Number of words of length `0..=max_len` (saturating).
    pub total_words: u128,
    pub sampled: bool,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &WordCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// `T_{w_1} .. T_{w_n}`; the empty word gives the identity.
pub fn target_product<S: Scalar>(
    targets: &BTreeMap<String, Matrix<S>>,
    word: &[String],
    d: usize,
) -> Result<Matrix<S>> {
    word.iter().try_fold(Matrix::identity(d), |acc, l| {
        let t = targets.get(l).ok_or_else(|| Error::UnknownLabel(l.clone()))?;
        acc.matmul(t)
    })
}

fn word_total(k: usize, max_len: usize) -> u128 {
    let mut total: u128 = 0;
    let mut layer: u128 = 1;
    for _ in 0..=max_len {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(k as u128);
    }
    total
}

/// Every word of length `0..=max_len`, by length and then lexicographically.
fn all_words(labels: &[String], max_len: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                labels.iter().map(move |l| {
                    let mut next = w.clone();
                    next.push(l.clone());
                    next
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Lengths 0 and 1 in full, then random longer words with the length drawn
/// in proportion to the number of words of that length.
fn sampled_words(labels: &[String], max_len: usize, cap: usize, seed: u64) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = all_words(labels, max_len.min(1));
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let k = labels.len();
    let lengths: Vec<usize> = (2..=max_len).collect();
    let weights: Vec<f64> = lengths.iter().map(|&n| (k as f64).powi(n as i32)).collect();
    let Ok(dist) = WeightedIndex::new(&weights) else {
        return out;
    };
    let mut attempts = 0;
    while out.len() < cap && attempts < cap * 20 {
        attempts += 1;
        let n = lengths[dist.sample(&mut rng)];
        let letters: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        if seen.insert(letters.clone()) {
            out.push(letters.into_iter().map(|i| labels[i].clone()).collect());
        }
    }
    out
}

fn check_word<S: Scalar>(
    triple: &DilationTriple<S>,
    targets: &BTreeMap<String, Matrix<S>>,
    word: Vec<String>,
    tolerance: f64,
) -> Result<WordCheck> {
    let got = triple.compress(&word)?;
    let want = target_product(targets, &word, triple.base_dim())?;
    let diff = got.sub(&want)?;
    let residual = diff.max_abs();
    let pass = match S::MODE {
        ScalarMode::Exact => diff.is_zero_matrix(),
        ScalarMode::Float => residual <= tolerance,
    };
    Ok(WordCheck { word, residual, pass })
}

fn check_targets<S: Scalar>(triple: &DilationTriple<S>, targets: &BTreeMap<String, Matrix<S>>) -> Result<()> {
    let d = triple.base_dim();
    for label in triple.operators().keys() {
        let t = targets.get(label).ok_or_else(|| Error::UnknownLabel(label.clone()))?;
        if t.rows() != d || t.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "target {label} is {}x{}, expected {d}x{d}",
                t.rows(),
                t.cols()
            )));
        }
    }
    Ok(())
}

fn report<S: Scalar>(
    triple: &DilationTriple<S>,
    checks: Vec<WordCheck>,
    tolerance: f64,
    total: u128,
    sampled: bool,
) -> VerificationReport {
    let longest = checks.iter().map(|c| c.word.len()).max().unwrap_or(0);
    VerificationReport {
        mode: S::MODE,
        max_residual: checks.iter().map(|c| c.residual).fold(0.0, f64::max),
        pass: checks.iter().all(|c| c.pass),
        tolerance: if S::MODE == ScalarMode::Exact { 0.0 } else { tolerance },
        in_contract: triple.guarantee().covers(longest),
        guarantee: triple.guarantee(),
        total_words: total,
        sampled,
        checks,
    }
}

/// Checks `Q U_w J = T_w` for all words of length `0..=max_len` over the
/// triple's labels, or a seeded sample when there are too many.
pub fn verify_dilation<S: Scalar>(
    triple: &DilationTriple<S>,
    targets: &BTreeMap<String, Matrix<S>>,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    check_targets(triple, targets)?;
    let labels = triple.labels();
    let total = word_total(labels.len(), opts.max_len);
    let sampled = total > opts.word_cap as u128;
    let words = if sampled {
        sampled_words(&labels, opts.max_len, opts.word_cap, opts.seed)
    } else {
        all_words(&labels, opts.max_len)
    };
    let checks =
        words.into_iter().map(|w| check_word(triple, targets, w, opts.tolerance)).collect::<Result<Vec<_>>>()?;
    Ok(report(triple, checks, opts.tolerance, total, sampled))
}

/// Checks an explicit list of words.
pub fn verify_words<S: Scalar>(
    triple: &DilationTriple<S>,
    targets: &BTreeMap<String, Matrix<S>>,
    words: &[Vec<String>],
    tolerance: f64,
) -> Result<VerificationReport> {
    check_targets(triple, targets)?;
    let checks = words.iter().map(|w| check_word(triple, targets, w.clone(), tolerance)).collect::<Result<Vec<_>>>()?;
    let n = checks.len() as u128;
    Ok(report(triple, checks, tolerance, n, false))
}
