use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::isometry::is_lp_isometry;
use crate::linalg::{best_rational_approximation, format_rational, Matrix, PNorm, Rational, Scalar};

/// `T = sum_k lambda_k T_k` with invertible isometries `T_k` and exact
/// rational weights. Zero-weight terms are dropped on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexCombination<S> {
    isometries: Vec<Matrix<S>>,
    weights: Vec<Rational>,
    labels: Vec<String>,
}

impl<S: Scalar> ConvexCombination<S> {
    /// Labels default to `T1, T2, ...`.
    pub fn new(isometries: Vec<Matrix<S>>, weights: Vec<Rational>, p: &PNorm) -> Result<Self> {
        let labels = (1..=isometries.len()).map(|k| format!("T{k}")).collect();
        Self::with_labels(isometries, weights, labels, p)
    }

    pub fn with_labels(
        isometries: Vec<Matrix<S>>,
        weights: Vec<Rational>,
        labels: Vec<String>,
        p: &PNorm,
    ) -> Result<Self> {
        if isometries.is_empty() {
            return Err(Error::Empty("convex combination"));
        }
        if weights.len() != isometries.len() || labels.len() != isometries.len() {
            return Err(Error::InvalidCombination(format!(
                "{} isometries, {} weights, {} labels",
                isometries.len(),
                weights.len(),
                labels.len()
            )));
        }
        let d = isometries[0].rows();
        let mut sum = Rational::zero();
        for ((t, w), label) in isometries.iter().zip(&weights).zip(&labels) {
            if !t.is_square() || t.rows() != d {
                return Err(Error::DimensionMismatch(format!(
                    "{label} is {}x{}, expected {d}x{d}",
                    t.rows(),
                    t.cols()
                )));
            }
            if w.is_negative() {
                return Err(Error::InvalidCombination(format!("negative weight {} on {label}", format_rational(w))));
            }
            sum += w;
        }
        if !sum.is_one() {
            return Err(Error::InvalidCombination(format!("weights sum to {}", format_rational(&sum))));
        }
        let mut out = Self { isometries: Vec::new(), weights: Vec::new(), labels: Vec::new() };
        for ((t, w), label) in isometries.into_iter().zip(weights).zip(labels) {
            if w.is_zero() {
                continue;
            }
            if !is_lp_isometry(&t, p) {
                return Err(Error::NotAnIsometry(format!("{label} on l^{p}")));
            }
            out.isometries.push(t);
            out.weights.push(w);
            out.labels.push(label);
        }
        Ok(out)
    }

    /// Float weights are converted losslessly and then divided by their
    /// exact sum, so the stored weights sum to one exactly.
    pub fn from_float_weights(
        isometries: Vec<Matrix<S>>,
        weights: &[f64],
        labels: Vec<String>,
        p: &PNorm,
    ) -> Result<Self> {
        let exact = exact_normalized(weights.iter().map(|&w| float_weight(w)).collect::<Result<Vec<_>>>()?)?;
        Self::with_labels(isometries, exact, labels, p)
    }

    /// Float weights snapped to the nearest fraction with denominator at most
    /// `max_denom`, then renormalized.
    pub fn from_snapped_weights(
        isometries: Vec<Matrix<S>>,
        weights: &[f64],
        max_denom: u64,
        labels: Vec<String>,
        p: &PNorm,
    ) -> Result<Self> {
        let snapped = weights
            .iter()
            .map(|&w| float_weight(w).map(|_| best_rational_approximation(w, max_denom)))
            .collect::<Result<Vec<_>>>()?;
        Self::with_labels(isometries, exact_normalized(snapped)?, labels, p)
    }

    pub fn isometries(&self) -> &[Matrix<S>] {
        &self.isometries
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of retained terms.
    pub fn m(&self) -> usize {
        self.isometries.len()
    }

    pub fn dim(&self) -> usize {
        self.isometries[0].rows()
    }

    pub fn operator(&self) -> Matrix<S> {
        let d = self.dim();
        self.isometries
            .iter()
            .zip(&self.weights)
            .fold(Matrix::zeros(d, d), |acc, (t, w)| acc.add(&t.scale(&S::from_rational(w))).expect("validated shapes"))
    }

    pub fn is_equal_weight(&self) -> bool {
        let m = Rational::from_integer(BigInt::from(self.m()));
        self.weights.iter().all(|w| w * &m == Rational::one())
    }

    /// Least common denominator of the weights.
    pub fn lcd(&self) -> BigInt {
        self.weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()))
    }
}

fn float_weight(w: f64) -> Result<Rational> {
    if !w.is_finite() || w < 0.0 {
        return Err(Error::InvalidCombination(format!("weight {w} is not a finite non-negative number")));
    }
    Ok(Rational::from_float(w).unwrap_or_else(Rational::zero))
}

fn exact_normalized(weights: Vec<Rational>) -> Result<Vec<Rational>> {
    let sum: Rational = weights.iter().sum();
    if sum.is_zero() {
        return Err(Error::InvalidCombination("weights sum to 0".into()));
    }
    Ok(weights.into_iter().map(|w| w / &sum).collect())
}

/// Equal-weight form over the least common denominator `L` of the
/// weights: each isometry repeated `lambda_k * L` times, all weights `1/L`.
pub fn rationalize_weights<S: Scalar>(combo: &ConvexCombination<S>, m_cap: usize) -> Result<ConvexCombination<S>> {
    let lcd = combo.lcd();
    match lcd.to_usize() {
        Some(l) if l <= m_cap => rationalize_weights_to(combo, l),
        _ => Err(Error::CapExceeded {
            what: "least common denominator",
            value: lcd.to_u128().unwrap_or(u128::MAX),
            cap: m_cap as u128,
        }),
    }
}

/// Equal-weight form with exactly `m` terms; `m` must be a multiple of every
/// weight's denominator.
pub fn rationalize_weights_to<S: Scalar>(combo: &ConvexCombination<S>, m: usize) -> Result<ConvexCombination<S>> {
    let big_m = Rational::from_integer(BigInt::from(m));
    let mut isometries = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for ((t, w), label) in combo.isometries.iter().zip(&combo.weights).zip(&combo.labels) {
        let count = w * &big_m;
        if !count.is_integer() {
            return Err(Error::InvalidParameter(format!(
                "weight {} of {label} is not a multiple of 1/{m}",
                format_rational(w)
            )));
        }
        let count = count.to_integer().to_usize().expect("bounded by m");
        for _ in 0..count {
            isometries.push(t.clone());
            labels.push(label.clone());
        }
    }
    let weight = Rational::new(BigInt::one(), BigInt::from(m));
    Ok(ConvexCombination { weights: vec![weight; isometries.len()], isometries, labels })
}

/// Brings every member of a family to equal-weight form over one shared
/// `m`, the least common multiple of all denominators.
pub fn equalize_family<S: Scalar>(
    family: &[(String, ConvexCombination<S>)],
    m_cap: usize,
) -> Result<Vec<(String, ConvexCombination<S>)>> {
    let lcd = family.iter().fold(BigInt::one(), |acc, (_, c)| acc.lcm(&c.lcd()));
    let m = match lcd.to_usize() {
        Some(l) if l <= m_cap => l,
        _ => {
            return Err(Error::CapExceeded {
                what: "least common denominator",
                value: lcd.to_u128().unwrap_or(u128::MAX),
                cap: m_cap as u128,
            })
        }
    };
    family.iter().map(|(name, c)| Ok((name.clone(), rationalize_weights_to(c, m)?))).collect()
}
