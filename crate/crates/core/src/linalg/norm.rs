use std::fmt;

use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::linalg::scalar::{format_rational, parse_rational, pow_u32, rational_to_f64, Rational, Scalar, ScalarMode};

/// Exponent `p in (1, inf)` together with its Hölder conjugate `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PNorm {
    p: Rational,
    q: Rational,
}

impl PNorm {
    pub fn new(p: Rational) -> Result<Self> {
        if p <= Rational::one() {
            return Err(Error::InvalidExponent(format_rational(&p)));
        }
        let q = &p / (&p - Rational::one());
        Ok(Self { p, q })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(parse_rational(s)?)
    }

    pub fn from_integer(p: i64) -> Result<Self> {
        Self::new(Rational::from_integer(p.into()))
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn p_f64(&self) -> f64 {
        rational_to_f64(&self.p)
    }

    pub fn q_f64(&self) -> f64 {
        rational_to_f64(&self.q)
    }

    pub fn is_two(&self) -> bool {
        self.p == Rational::from_integer(2.into())
    }

    pub fn integer_p(&self) -> Option<u32> {
        if self.p.is_integer() {
            self.p.numer().to_u32()
        } else {
            None
        }
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.p))
    }
}

/// Norm carried by a constructed space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceNorm {
    L1,
    Lp(PNorm),
}

impl fmt::Display for SpaceNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceNorm::L1 => f.write_str("1"),
            SpaceNorm::Lp(p) => write!(f, "{p}"),
        }
    }
}

/// Dimension, norm and a human-readable account of how a space was built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceDescriptor {
    pub dim: usize,
    pub norm: SpaceNorm,
    pub structure: String,
}

impl SpaceDescriptor {
    pub fn new(dim: usize, norm: SpaceNorm, structure: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("space dimension must be positive".into()));
        }
        Ok(Self { dim, norm, structure: structure.into() })
    }
}

/// `(sum |v_k|^p)^(1/p)`, always as `f64`.
pub fn lp_norm<S: Scalar>(v: &[S], norm: &PNorm) -> f64 {
    let p = norm.p_f64();
    let sum: f64 = match norm.integer_p() {
        Some(k) => v.iter().map(|x| pow_u32(&x.abs().to_f64(), k)).sum(),
        None => v.iter().map(|x| x.abs().to_f64().powf(p)).sum(),
    };
    sum.powf(1.0 / p)
}

/// `sum |v_k|^p`. Exact in exact mode, which requires an integer `p`.
pub fn lp_norm_pow_p<S: Scalar>(v: &[S], norm: &PNorm) -> Result<S> {
    match norm.integer_p() {
        Some(k) => Ok(v.iter().fold(S::zero(), |acc, x| acc + pow_u32(&x.abs(), k))),
        None if S::MODE == ScalarMode::Float => {
            let p = norm.p_f64();
            Ok(S::from_f64(v.iter().map(|x| x.abs().to_f64().powf(p)).sum()))
        }
        None => Err(Error::NonIntegerExponent(norm.to_string())),
    }
}
