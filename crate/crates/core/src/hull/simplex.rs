//! Phase-1 simplex over exact rationals with Bland's rule.

use num_traits::{One, Signed, Zero};

use crate::linalg::Rational;

#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    /// `x >= 0` with `A x = b`.
    Feasible(Vec<Rational>),
    /// Farkas vector `y` with `y^T A <= 0` and `y^T b > 0`.
    Infeasible(Vec<Rational>),
}

/// Decides whether `{x >= 0 : A x = b}` is non-empty.
pub fn feasibility(a: &[Vec<Rational>], b: &[Rational]) -> Feasibility {
    let rows = a.len();
    let n = a.first().map_or(0, Vec::len);
    let width = n + rows;

    // negate rows so that the right-hand side is non-negative
    let signs: Vec<bool> = b.iter().map(|x| x.is_negative()).collect();
    let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(rows);
    let mut rhs: Vec<Rational> = Vec::with_capacity(rows);
    for r in 0..rows {
        let mut row: Vec<Rational> = a[r].iter().map(|x| if signs[r] { -x } else { x.clone() }).collect();
        row.extend((0..rows).map(|k| if k == r { Rational::one() } else { Rational::zero() }));
        tab.push(row);
        rhs.push(if signs[r] { -&b[r] } else { b[r].clone() });
    }
    // reduced costs of the phase-1 objective (sum of artificials)
    let mut cost: Vec<Rational> = (0..width)
        .map(|j| if j < n { -tab.iter().map(|row| &row[j]).sum::<Rational>() } else { Rational::zero() })
        .collect();
    let mut objective: Rational = rhs.iter().sum();
    let mut basis: Vec<usize> = (n..width).collect();

    while let Some(enter) = (0..width).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for r in 0..rows {
            if !tab[r][enter].is_positive() {
                continue;
            }
            let ratio = &rhs[r] / &tab[r][enter];
            let better = match &leave {
                None => true,
                Some((best_r, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*best_r]),
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        // the phase-1 objective is bounded below, so a leaving row exists
        let (pr, _) = leave.expect("phase-1 problem is bounded");
        let pivot = tab[pr][enter].clone();
        for x in tab[pr].iter_mut() {
            *x = &*x / &pivot;
        }
        rhs[pr] = &rhs[pr] / &pivot;
        let prow = tab[pr].clone();
        let prhs = rhs[pr].clone();
        for r in 0..rows {
            if r == pr || tab[r][enter].is_zero() {
                continue;
            }
            let f = tab[r][enter].clone();
            for (x, p) in tab[r].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x = &*x - &f * p;
                }
            }
            rhs[r] = &rhs[r] - &f * &prhs;
        }
        let f = cost[enter].clone();
        for (x, p) in cost.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *x = &*x - &f * p;
            }
        }
        objective = &objective + &f * &prhs;
        basis[pr] = enter;
    }

    if objective.is_zero() {
        let mut x = vec![Rational::zero(); n];
        for (r, &j) in basis.iter().enumerate() {
            if j < n {
                x[j] = rhs[r].clone();
            }
        }
        Feasibility::Feasible(x)
    } else {
        // y_r = 1 - (reduced cost of artificial r), mapped back through the row signs
        let y = (0..rows)
            .map(|r| {
                let v = Rational::one() - &cost[n + r];
                if signs[r] {
                    -v
                } else {
                    v
                }
            })
            .collect();
        Feasibility::Infeasible(y)
    }
}
