//! Exact vertex enumeration for small instances.
//!
//! The feasible set `{a : |A a| ≤ 1}` is a bounded polytope when `Z` is
//! norming, and `a ↦ sup_B |P_a|` is convex, so its maximum over the
//! polytope sits at a vertex. Every vertex is the solution of `N` tight,
//! linearly independent constraints `P(z_j) = ±1`.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::poly::{basis_values, max_abs_on_ball, monomial_count, univariate_max_abs, Basis, MultiPoly};

pub const ORACLE_MAX_COEFFS: usize = 10;
pub const ORACLE_MAX_POINTS: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub value: f64,
    /// False when some per-vertex supremum came from a grid search, which
    /// only bounds it from below.
    pub exact: bool,
    /// Proven upper bound on `R_d(Z)`: equal to `value` when exact, and
    /// otherwise bounded through `|P| ≤ Σ |c_α|` on the ball.
    pub upper: f64,
    pub vertices: usize,
    pub argmax_poly: MultiPoly,
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=m - (k - cur.len()) {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    if k <= m {
        rec(0, m, k, &mut cur, &mut out);
    }
    out
}

/// `sup_{B^n} |P|`, exact when `n = 1` or `deg ≤ 1`.
pub fn ball_sup(p: &MultiPoly) -> (f64, bool) {
    let mono = p.to_monomial();
    if p.n() == 1 {
        return (univariate_max_abs(mono.coeffs()).0, true);
    }
    if p.degree_bound() <= 1 {
        let a = mono.coeff(&vec![0; p.n()]);
        let grad: f64 = (0..p.n())
            .map(|i| {
                let mut e = vec![0; p.n()];
                e[i] = 1;
                mono.coeff(&e).powi(2)
            })
            .sum();
        return (a.abs() + grad.sqrt(), true);
    }
    (max_abs_on_ball(p, 1.0 / 128.0, 40).value, false)
}

/// `R_d(Z)` by enumeration of all vertices of the constraint polytope.
pub fn vertex_oracle(z: &PointSet, d: usize) -> Result<OracleValue> {
    let n_coeffs = monomial_count(z.n(), d)?;
    let m = z.len();
    if n_coeffs > ORACLE_MAX_COEFFS || m > ORACLE_MAX_POINTS {
        return Err(Error::OracleBudget(format!(
            "{n_coeffs} coefficients and {m} points exceed the limits {ORACLE_MAX_COEFFS} and {ORACLE_MAX_POINTS}"
        )));
    }
    if !super::is_norming(z, d, super::RANK_TOLERANCE) {
        return Err(Error::NotNorming { d });
    }
    let basis = Basis::Monomial;
    let rows: Vec<Vec<f64>> = z.points().iter().map(|p| basis_values(d, basis, p)).collect();

    // Vertices keyed by their coefficient bits; `−v` is covered by fixing
    // the first sign, since `sup |P|` is even in `P`.
    let mut seen = BTreeSet::new();
    let mut best: Option<(f64, MultiPoly)> = None;
    let mut exact = true;
    let mut upper = 0.0f64;
    for subset in subsets(m, n_coeffs) {
        let a = DMatrix::from_fn(n_coeffs, n_coeffs, |i, j| rows[subset[i]][j]);
        let lu = a.lu();
        if lu.determinant().abs() < 1e-13 {
            continue;
        }
        for mask in 0..1usize << (n_coeffs - 1) {
            let s = DVector::from_fn(n_coeffs, |i, _| if i > 0 && mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 });
            let Some(sol) = lu.solve(&s) else { continue };
            let coeffs: Vec<f64> = sol.iter().copied().collect();
            let feasible = rows
                .iter()
                .all(|r| r.iter().zip(&coeffs).map(|(x, y)| x * y).sum::<f64>().abs() <= 1.0 + 1e-9);
            if !feasible {
                continue;
            }
            let key: Vec<i64> = coeffs.iter().map(|c| (c * 1e9).round() as i64).collect();
            let neg: Vec<i64> = key.iter().map(|k| -k).collect();
            if seen.contains(&key) || seen.contains(&neg) {
                continue;
            }
            seen.insert(key);
            let p = MultiPoly::from_coeffs(z.n(), d, basis, coeffs)?;
            let (v, ex) = ball_sup(&p);
            exact &= ex;
            let certified = if ex { v } else { p.coeffs().iter().map(|c| c.abs()).sum::<f64>().max(v) };
            upper = upper.max(certified);
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, p));
            }
        }
    }
    let (value, argmax_poly) = best.ok_or_else(|| Error::Numerical("no feasible vertex found".into()))?;
    Ok(OracleValue {
        value,
        exact,
        upper,
        vertices: seen.len(),
        argmax_poly,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::generate_triangle;

    #[test]
    fn triangle_closed_form() {
        for h in [0.5, 0.2, 0.1] {
            let z = generate_triangle(h).unwrap();
            let r = vertex_oracle(&z, 1).unwrap();
            assert!(r.exact);
            assert_eq!(r.upper, r.value);
            assert!((r.value - (1.0 + 2.0 / h)).abs() < 1e-12, "{h}: {}", r.value);
        }
    }

    #[test]
    fn endpoints_of_the_interval() {
        let z = PointSet::new(1, vec![vec![-1.0], vec![1.0]]).unwrap();
        assert!((vertex_oracle(&z, 1).unwrap().value - 1.0).abs() < 1e-15);
        let three = PointSet::new(1, vec![vec![-1.0], vec![0.0], vec![1.0]]).unwrap();
        assert!((vertex_oracle(&three, 2).unwrap().value - 1.25).abs() < 1e-12);
    }

    #[test]
    fn budget_and_degeneracy() {
        let many = PointSet::new(1, (0..13).map(|i| vec![-0.9 + 0.15 * i as f64]).collect()).unwrap();
        assert!(matches!(vertex_oracle(&many, 2), Err(Error::OracleBudget(_))));
        let two = PointSet::new(1, vec![vec![-0.5], vec![0.5]]).unwrap();
        assert!(matches!(vertex_oracle(&two, 2), Err(Error::NotNorming { d: 2 })));
    }
}
