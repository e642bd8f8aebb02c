use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScalarMode {
    Exact,
    Float,
}

impl ScalarMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarMode::Exact => "exact",
            ScalarMode::Float => "float",
        }
    }
}

impl Display for ScalarMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Real scalar field used for matrix entries.
///
/// Implemented for [`Rational`] (exact, no rounding anywhere) and `f64`.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    const MODE: ScalarMode;

    fn from_rational(r: &Rational) -> Self;

    /// Lossless for `Rational` (every finite double is a dyadic rational).
    fn from_f64(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    /// Exact mode: identically zero. Float mode: `|x| <= tol`.
    fn is_negligible(&self, tol: f64) -> bool;

    fn from_i64(x: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(x)))
    }
}

impl Scalar for Rational {
    const MODE: ScalarMode = ScalarMode::Exact;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).unwrap_or_else(Rational::zero)
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn from_i64(x: i64) -> Self {
        Rational::from_integer(BigInt::from(x))
    }
}

impl Scalar for f64 {
    const MODE: ScalarMode = ScalarMode::Float;

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn is_negligible(&self, tol: f64) -> bool {
        f64::abs(*self) <= tol
    }

    fn from_i64(x: i64) -> Self {
        x as f64
    }
}

/// Converts a rational to the nearest double, even when numerator and
/// denominator individually overflow `f64`.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        if v.is_finite() {
            return v;
        }
    }
    let numer = r.numer();
    let denom = r.denom();
    let shift = numer.bits().max(denom.bits()).saturating_sub(1000) as usize;
    let n = (numer >> shift).to_f64().unwrap_or(0.0);
    let d = (denom >> shift).to_f64().unwrap_or(1.0);
    n / d
}

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"a"`, `"-a/b"` or a decimal literal such as `"0.25"` into an exact
/// rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = || Error::Parse(format!("not a rational number: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Ok(Rational::from_integer(n));
    }
    // decimal literal, interpreted exactly in base ten
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').ok_or_else(err)?;
    if frac_part.is_empty() && int_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| err())?;
    let scale = BigInt::from(10u32).pow(frac_part.len() as u32 + 1);
    let value = Rational::new(digits, scale);
    Ok(if neg { -value } else { value })
}

/// `"n/d"`, or `"n"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Best rational approximation of `x` with denominator at most `max_denom`
/// (continued-fraction convergents and semiconvergents).
pub fn best_rational_approximation(x: f64, max_denom: u64) -> Rational {
    assert!(max_denom >= 1, "max_denom must be positive");
    if !x.is_finite() {
        return Rational::zero();
    }
    let exact = Rational::from_float(x).unwrap_or_else(Rational::zero);
    let neg = exact.is_negative();
    let target = Signed::abs(&exact);
    let max_d = BigInt::from(max_denom);

    // convergents h/k
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let mut rest = target.clone();
    let best = loop {
        let a = rest.floor().to_integer();
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        if k_next > max_d {
            // largest admissible semiconvergent
            let t = (&max_d - &k_prev) / &k;
            let semi = Rational::new(&t * &h + &h_prev, &t * &k + &k_prev);
            let conv = Rational::new(h.clone(), k.clone());
            let pick = if Signed::abs(&(&semi - &target)) < Signed::abs(&(&conv - &target)) && !t.is_zero() {
                semi
            } else {
                conv
            };
            break pick;
        }
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            break Rational::new(h.clone(), k.clone());
        }
        rest = frac.recip();
    };
    if neg {
        -best
    } else {
        best
    }
}

/// `x^n` for a non-negative integer power by repeated squaring.
pub fn pow_u32<S: Scalar>(x: &S, mut n: u32) -> S {
    let mut base = x.clone();
    let mut acc = S::one();
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * base.clone();
        }
        n >>= 1;
        if n > 0 {
            base = base.clone() * base;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_positive_denominator() {
        let r = rational(6, -8);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(4));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6").unwrap(), rational(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), integer(-7));
        assert_eq!(parse_rational("0.25").unwrap(), rational(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rational(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(format_rational(&rational(2, 4)), "1/2");
        assert_eq!(format_rational(&integer(-3)), "-3");
    }

    #[test]
    fn best_approximation_of_pi_and_one_third() {
        assert_eq!(best_rational_approximation(std::f64::consts::PI, 10), rational(22, 7));
        assert_eq!(best_rational_approximation(std::f64::consts::PI, 200), rational(355, 113));
        assert_eq!(best_rational_approximation(1.0 / 3.0, 64), rational(1, 3));
        assert_eq!(best_rational_approximation(-0.5, 64), rational(-1, 2));
        assert_eq!(best_rational_approximation(0.0, 64), integer(0));
    }

    #[test]
    fn best_approximation_error_is_small() {
        let x = 2f64.powf(-2.0 / 3.0);
        let r = best_rational_approximation(x, 1_000_000);
        assert!(*r.denom() <= BigInt::from(1_000_000));
        assert!((rational_to_f64(&r) - x).abs() < 1e-11);
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = Rational::new(BigInt::from(3) << 2000usize, BigInt::from(1) << 2001usize);
        assert!((rational_to_f64(&big) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn integer_powers() {
        assert_eq!(pow_u32(&rational(1, 2), 3), rational(1, 8));
        assert_eq!(pow_u32(&2.0f64, 10), 1024.0);
        assert_eq!(pow_u32(&rational(5, 7), 0), integer(1));
    }
}
