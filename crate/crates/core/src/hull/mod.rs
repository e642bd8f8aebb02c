//! Exact membership in the convex (or subconvex) hull of finitely many
//! matrices, with a separating functional when the answer is no.

mod simplex;

pub use simplex::{feasibility, Feasibility};

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::isometry::{all_permutations, all_signed_permutations, SignedPermutation};
use crate::linalg::{best_rational_approximation, rational_to_f64, Matrix, PNorm, Rational};

pub const GENERATOR_CAP: usize = 5000;
pub const SNAP_DENOMINATOR: u64 = 1_000_000;
/// Rank-one certificates are searched for up to this dimension.
const RANK_ONE_SEARCH_DIM: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HullMode {
    /// `sum w = 1`.
    Convex,
    /// `sum w <= 1`, i.e. the convex hull together with 0.
    Subconvex,
}

impl HullMode {
    pub fn as_str(self) -> &'static str {
        match self {
            HullMode::Convex => "convex",
            HullMode::Subconvex => "subconvex",
        }
    }
}

impl fmt::Display for HullMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MembershipStatus {
    Member,
    NonMember,
}

/// `<u, G v> <= bound` for every generator `G`, `<u, T v> > bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOnePair {
    pub u: Vec<Rational>,
    pub v: Vec<Rational>,
    pub bound: Rational,
    pub target_value: Rational,
}

/// Linear functional `<Y, X> = sum_ij Y_ij X_ij` with `<Y, G> <= bound`
/// on every generator (and `bound >= 0` in subconvex mode) but
/// `<Y, T> > bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub functional: Matrix<Rational>,
    pub bound: Rational,
    pub target_value: Rational,
    pub rank_one: Option<RankOnePair>,
}

impl Certificate {
    /// Re-evaluates every inequality directly.
    pub fn verify(&self, target: &Matrix<Rational>, generators: &[(String, Matrix<Rational>)], mode: HullMode) -> bool {
        let below = |g: &Matrix<Rational>| pairing(&self.functional, g) <= self.bound;
        let general = generators.iter().all(|(_, g)| below(g))
            && pairing(&self.functional, target) > self.bound
            && (mode == HullMode::Convex || !self.bound.is_negative());
        let rank_one = self.rank_one.as_ref().is_none_or(|r| {
            generators.iter().all(|(_, g)| bilinear(&r.u, g, &r.v) <= r.bound)
                && bilinear(&r.u, target, &r.v) > r.bound
                && (mode == HullMode::Convex || !r.bound.is_negative())
        });
        general && rank_one
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipResult {
    pub status: MembershipStatus,
    pub mode: HullMode,
    /// Positive weights only, in generator order.
    pub coefficients: Vec<(String, Rational)>,
    /// `1 - sum w` in subconvex mode.
    pub slack: Option<Rational>,
    pub certificate: Option<Certificate>,
}

impl MembershipResult {
    pub fn is_member(&self) -> bool {
        self.status == MembershipStatus::Member
    }

    pub fn reconstruct(&self, generators: &[(String, Matrix<Rational>)], d: usize) -> Matrix<Rational> {
        self.coefficients.iter().fold(Matrix::zeros(d, d), |acc, (label, w)| {
            let g = &generators.iter().find(|(l, _)| l == label).expect("coefficient labels come from generators").1;
            acc.add(&g.scale(w)).expect("same shape")
        })
    }
}

fn pairing(y: &Matrix<Rational>, x: &Matrix<Rational>) -> Rational {
    y.data().iter().zip(x.data()).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum()
}

fn bilinear(u: &[Rational], m: &Matrix<Rational>, v: &[Rational]) -> Rational {
    let mv = m.apply(v).expect("matching dimension");
    u.iter().zip(&mv).map(|(a, b)| a * b).sum()
}

/// Decides whether `T` lies in the convex (or subconvex) hull of the
/// generators by an exact phase-1 simplex.
pub fn hull_membership(
    target: &Matrix<Rational>,
    generators: &[(String, Matrix<Rational>)],
    mode: HullMode,
) -> Result<MembershipResult> {
    if generators.is_empty() {
        return Err(Error::Empty("generator set"));
    }
    if generators.len() > GENERATOR_CAP {
        return Err(Error::CapExceeded {
            what: "generators",
            value: generators.len() as u128,
            cap: GENERATOR_CAP as u128,
        });
    }
    let (r, c) = (target.rows(), target.cols());
    if let Some((label, _)) = generators.iter().find(|(_, g)| g.rows() != r || g.cols() != c) {
        return Err(Error::DimensionMismatch(format!("generator {label} does not match the {r}x{c} target")));
    }

    let ng = generators.len();
    let vars = ng + usize::from(mode == HullMode::Subconvex);
    let mut a: Vec<Vec<Rational>> = Vec::with_capacity(r * c + 1);
    let mut b: Vec<Rational> = Vec::with_capacity(r * c + 1);
    for e in 0..r * c {
        let mut row: Vec<Rational> = generators.iter().map(|(_, g)| g.data()[e].clone()).collect();
        row.resize(vars, Rational::zero());
        a.push(row);
        b.push(target.data()[e].clone());
    }
    a.push(vec![Rational::one(); vars]);
    b.push(Rational::one());

    match feasibility(&a, &b) {
        Feasibility::Feasible(x) => {
            let coefficients = generators
                .iter()
                .zip(&x)
                .filter(|(_, w)| !w.is_zero())
                .map(|((label, _), w)| (label.clone(), w.clone()))
                .collect();
            Ok(MembershipResult {
                status: MembershipStatus::Member,
                mode,
                coefficients,
                slack: (mode == HullMode::Subconvex).then(|| x[ng].clone()),
                certificate: None,
            })
        }
        Feasibility::Infeasible(y) => {
            let functional = Matrix::new(r, c, y[..r * c].to_vec())?;
            let bound = -y[r * c].clone();
            let target_value = pairing(&functional, target);
            let rank_one = rank_one_pair(target, generators, mode);
            Ok(MembershipResult {
                status: MembershipStatus::NonMember,
                mode,
                coefficients: Vec::new(),
                slack: None,
                certificate: Some(Certificate { functional, bound, target_value, rank_one }),
            })
        }
    }
}

fn sign_vectors(d: usize, values: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v| {
                values.iter().map(move |&x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&x| x != 0));
    out
}

/// Searches `u, v` with entries in `{0, 1}` first and then `{-1, 0, 1}`,
/// keeping the pair with the largest margin. Candidates are screened in
/// floating point and confirmed exactly.
fn rank_one_pair(
    target: &Matrix<Rational>,
    generators: &[(String, Matrix<Rational>)],
    mode: HullMode,
) -> Option<RankOnePair> {
    let d = target.rows();
    if d != target.cols() || d > RANK_ONE_SEARCH_DIM {
        return None;
    }
    let gens: Vec<Matrix<f64>> = generators.iter().map(|(_, g)| g.to_f64()).collect();
    let tf = target.to_f64();
    let bil = |u: &[i64], m: &Matrix<f64>, v: &[i64]| -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            if u[i] == 0 {
                continue;
            }
            for j in 0..d {
                s += (u[i] * v[j]) as f64 * m[(i, j)];
            }
        }
        s
    };
    for values in [&[0, 1][..], &[-1, 0, 1][..]] {
        let vecs = sign_vectors(d, values);
        let mut best: Option<(f64, &Vec<i64>, &Vec<i64>)> = None;
        for u in &vecs {
            for v in &vecs {
                let mut bound = gens.iter().map(|g| bil(u, g, v)).fold(f64::NEG_INFINITY, f64::max);
                if mode == HullMode::Subconvex {
                    bound = bound.max(0.0);
                }
                let margin = bil(u, &tf, v) - bound;
                if margin > 1e-12 && best.is_none_or(|(m, _, _)| margin > m) {
                    best = Some((margin, u, v));
                }
            }
        }
        if let Some((_, u, v)) = best {
            let u: Vec<Rational> = u.iter().map(|&x| Rational::from_integer(x.into())).collect();
            let v: Vec<Rational> = v.iter().map(|&x| Rational::from_integer(x.into())).collect();
            let mut bound = generators.iter().map(|(_, g)| bilinear(&u, g, &v)).max().expect("non-empty");
            if mode == HullMode::Subconvex && bound.is_negative() {
                bound = Rational::zero();
            }
            let target_value = bilinear(&u, target, &v);
            if target_value > bound {
                return Some(RankOnePair { u, v, bound, target_value });
            }
        }
    }
    None
}

/// Rounds each entry to the nearest fraction with denominator at most
/// `max_denom`; returns the largest entrywise rounding error.
pub fn snap_matrix(m: &Matrix<f64>, max_denom: u64) -> (Matrix<Rational>, f64) {
    let snapped = m.map(|&x| best_rational_approximation(x, max_denom));
    let err = m.data().iter().zip(snapped.data()).map(|(x, r)| (x - rational_to_f64(r)).abs()).fold(0.0, f64::max);
    (snapped, err)
}

/// Default generators: all permutations (`positive`) or all signed
/// permutations of dimension `d`, labelled as in [`SignedPermutation::label`].
pub fn permutation_generators(d: usize, signed: bool) -> Result<Vec<(String, Matrix<Rational>)>> {
    let perms = if signed { all_signed_permutations(d, 5)? } else { all_permutations(d, 5)? };
    Ok(perms.iter().map(|p| (p.label(), p.to_matrix())).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositiveScan {
    pub d: usize,
    pub signed_count: usize,
    pub positive: Vec<SignedPermutation>,
    /// The positive isometries are exactly the `d!` permutations.
    pub matches_permutations: bool,
}

/// Filters the signed permutations of `l^p_d` (`p != 2`) down to the
/// entrywise non-negative ones.
pub fn positive_isometry_scan(d: usize, p: &PNorm) -> Result<PositiveScan> {
    if p.is_two() {
        return Err(Error::InvalidParameter("the scan applies to p != 2".into()));
    }
    let signed = all_signed_permutations(d, 4)?;
    let positive: Vec<SignedPermutation> = signed.iter().filter(|s| s.is_positive()).cloned().collect();
    let perms = all_permutations(d, 4)?;
    Ok(PositiveScan { d, signed_count: signed.len(), matches_permutations: positive == perms, positive })
}
