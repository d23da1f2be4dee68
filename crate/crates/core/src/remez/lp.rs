//! Dense two-phase simplex for the inner Remez problem.
//!
//! For a fixed point `x` the inner problem is
//!
//! ```text
//! maximize c·a  subject to  −1 ≤ (A a)_j ≤ 1,
//! ```
//!
//! with `A` the evaluation matrix of `Z` and `c = φ(x)`. The simplex runs on
//! the equality-form dual `min 1·(u + v)` subject to `Aᵀ(u − v) = c`,
//! `u, v ≥ 0`, which has only `N` rows. The primal optimizer is read off the
//! final basis.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{euclidean_distance, PointSet};
use crate::poly::{basis_values, monomial_count, Basis, MultiPoly};

pub const PIVOT_TOLERANCE: f64 = 1e-10;
const FEASIBILITY_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// `+∞` when unbounded.
    pub value: f64,
    /// Optimal coefficients, or the certified ray when unbounded.
    pub coeffs: Vec<f64>,
    pub basis: Basis,
    /// Tight constraints `(point index, sign)` with `sign · P(z_j) = 1`.
    pub active: Vec<(usize, i8)>,
    pub pivots: usize,
}

impl LpSolution {
    pub fn polynomial(&self, n: usize, d: usize) -> MultiPoly {
        MultiPoly::from_coeffs(n, d, self.basis, self.coeffs.clone()).expect("coefficient count matches")
    }
}

/// Evaluation matrix of `Z` for degree `d`, built once and reused for every
/// evaluation point.
///
/// Large sets are handled by constraint generation: the simplex runs on a
/// spread-out subset of the points, violated constraints are added, and the
/// loop stops once the subset optimum is feasible for all of `Z`. It is then
/// optimal for the full problem.
#[derive(Clone, Debug)]
pub struct RemezLp {
    n: usize,
    d: usize,
    basis: Basis,
    rows: Vec<Vec<f64>>,
    /// Farthest-first order of the points, used to seed the working set.
    order: Vec<usize>,
}

enum SubResult {
    Optimal { pi: Vec<f64>, objective: f64, active: Vec<(usize, i8)>, pivots: usize },
    Infeasible { pivots: usize },
}

fn farthest_first_order(points: &[Vec<f64>]) -> Vec<usize> {
    let m = points.len();
    if m == 0 {
        return Vec::new();
    }
    let mut order = vec![0];
    let mut taken = vec![false; m];
    taken[0] = true;
    let mut dist: Vec<f64> = points.iter().map(|p| euclidean_distance(&points[0], p)).collect();
    for _ in 1..m {
        let mut pick = usize::MAX;
        for j in 0..m {
            if !taken[j] && (pick == usize::MAX || dist[j] > dist[pick]) {
                pick = j;
            }
        }
        taken[pick] = true;
        order.push(pick);
        for j in 0..m {
            if !taken[j] {
                dist[j] = dist[j].min(euclidean_distance(&points[pick], &points[j]));
            }
        }
    }
    order
}

impl RemezLp {
    pub fn new(z: &PointSet, d: usize, basis: Basis) -> Result<RemezLp> {
        monomial_count(z.n(), d)?;
        let rows = z.points().iter().map(|p| basis_values(d, basis, p)).collect();
        Ok(RemezLp {
            n: z.n(),
            d,
            basis,
            rows,
            order: farthest_first_order(z.points()),
        })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn num_coeffs(&self) -> usize {
        monomial_count(self.n, self.d).expect("checked at construction")
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let cols = self.num_coeffs();
        DMatrix::from_fn(self.rows.len(), cols, |i, j| self.rows[i][j])
    }

    /// `sup { sign · P(x) : |P(z_j)| ≤ 1 }`.
    pub fn solve(&self, x: &[f64], sign: f64) -> Result<LpSolution> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        let c: Vec<f64> = basis_values(self.d, self.basis, x).into_iter().map(|v| sign * v).collect();
        self.solve_objective(&c)
    }

    fn eval_row(&self, j: usize, pi: &[f64]) -> f64 {
        self.rows[j].iter().zip(pi).map(|(a, b)| a * b).sum()
    }

    pub fn solve_objective(&self, c: &[f64]) -> Result<LpSolution> {
        let m = self.rows.len();
        let n_coeffs = c.len();
        let mut in_set = vec![false; m];
        let mut working: Vec<usize> = Vec::new();
        let mut next = 0;
        let mut grow = |working: &mut Vec<usize>, in_set: &mut Vec<bool>, k: usize| {
            while working.len() < k && next < m {
                let j = self.order[next];
                next += 1;
                if !in_set[j] {
                    in_set[j] = true;
                    working.push(j);
                }
            }
        };
        grow(&mut working, &mut in_set, (4 * n_coeffs).max(24).min(m));

        let mut pivots = 0;
        loop {
            working.sort_unstable();
            match self.simplex_on(&working, c)? {
                SubResult::Infeasible { pivots: p } => {
                    pivots += p;
                    if working.len() == m {
                        return self.unbounded_ray(c, pivots);
                    }
                    let target = (2 * working.len()).min(m);
                    grow(&mut working, &mut in_set, target);
                }
                SubResult::Optimal { pi, objective, active, pivots: p } => {
                    pivots += p;
                    let mut violated: Vec<(f64, usize)> = (0..m)
                        .filter(|&j| !in_set[j])
                        .map(|j| (self.eval_row(j, &pi).abs(), j))
                        .filter(|(v, _)| *v > 1.0 + FEASIBILITY_SLACK)
                        .collect();
                    if violated.is_empty() {
                        return self.finish(c, pi, objective, active, pivots);
                    }
                    violated.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
                    for &(_, j) in violated.iter().take(2 * n_coeffs.max(4)) {
                        in_set[j] = true;
                        working.push(j);
                    }
                }
            }
        }
    }

    fn finish(
        &self,
        c: &[f64],
        pi: Vec<f64>,
        objective: f64,
        active: Vec<(usize, i8)>,
        pivots: usize,
    ) -> Result<LpSolution> {
        let worst = (0..self.rows.len()).map(|j| self.eval_row(j, &pi).abs()).fold(0.0, f64::max);
        let value: f64 = c.iter().zip(&pi).map(|(a, b)| a * b).sum();
        if worst > 1.0 + FEASIBILITY_SLACK || (value - objective).abs() > 1e-7 * objective.abs().max(1.0) {
            return Err(Error::Numerical(format!(
                "primal recovery failed: max |P(z)| = {worst}, value {value} vs dual {objective}"
            )));
        }
        // Rescale away the roundoff overshoot so `value` is a sound ratio.
        let shrink = worst.max(1.0);
        Ok(LpSolution {
            status: LpStatus::Optimal,
            value: value / shrink,
            coeffs: pi.iter().map(|v| v / shrink).collect(),
            basis: self.basis,
            active,
            pivots,
        })
    }

    // Two-phase simplex on the dual restricted to the points `idx`.
    fn simplex_on(&self, idx: &[usize], c: &[f64]) -> Result<SubResult> {
        let n_rows = c.len();
        let m = idx.len();
        let cols = 2 * m;
        let width = cols + n_rows + 1;
        let rhs = width - 1;

        // Tableau rows 0..n_rows are constraints, row n_rows is the cost row.
        let mut t = vec![vec![0.0; width]; n_rows + 1];
        for i in 0..n_rows {
            let flip = if c[i] < 0.0 { -1.0 } else { 1.0 };
            for (k, &j) in idx.iter().enumerate() {
                t[i][k] = flip * self.rows[j][i];
                t[i][k + m] = -flip * self.rows[j][i];
            }
            t[i][cols + i] = 1.0;
            t[i][rhs] = flip * c[i];
        }
        let mut basic: Vec<usize> = (cols..cols + n_rows).collect();

        // Phase 1: minimize the sum of artificials.
        for j in 0..width {
            if j < cols || j == rhs {
                t[n_rows][j] = -(0..n_rows).map(|i| t[i][j]).sum::<f64>();
            }
        }
        let mut pivots = run_simplex(&mut t, &mut basic, usize::MAX)?;
        let scale = c.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        if -t[n_rows][rhs] > FEASIBILITY_SLACK * scale {
            return Ok(SubResult::Infeasible { pivots });
        }

        // Drive remaining artificials out of the basis where possible.
        for i in 0..n_rows {
            if basic[i] >= cols {
                if let Some(j) = (0..cols).find(|&j| t[i][j].abs() > PIVOT_TOLERANCE) {
                    pivot(&mut t, &mut basic, i, j);
                    pivots += 1;
                }
            }
        }

        // Phase 2 cost row: unit cost on every structural column.
        let cb: Vec<f64> = basic.iter().map(|&b| if b < cols { 1.0 } else { 0.0 }).collect();
        for j in 0..width {
            let own = if j < cols { 1.0 } else { 0.0 };
            let z: f64 = (0..n_rows).map(|i| cb[i] * t[i][j]).sum();
            t[n_rows][j] = if j == rhs { -z } else { own - z };
        }
        for j in cols..cols + n_rows {
            t[n_rows][j] = 0.0;
        }
        pivots += run_simplex(&mut t, &mut basic, cols)?;
        let objective = -t[n_rows][rhs];

        // Primal recovery: E_Bᵀ π = 1 over the structural basic columns.
        let structural: Vec<usize> = basic.iter().copied().filter(|&b| b < cols).collect();
        let entry = |col: usize, k: usize| {
            let s = if col < m { 1.0 } else { -1.0 };
            s * self.rows[idx[col % m]][k]
        };
        let bt = DMatrix::from_fn(structural.len(), n_rows, |r, k| entry(structural[r], k));
        let ones = DVector::from_element(structural.len(), 1.0);
        let pi = if structural.len() == n_rows {
            bt.clone().lu().solve(&ones)
        } else {
            None
        }
        .or_else(|| bt.clone().svd(true, true).solve(&ones, 1e-12).ok())
        .ok_or_else(|| Error::Numerical("singular final basis".into()))?;
        let mut active: Vec<(usize, i8)> = structural
            .iter()
            .map(|&col| (idx[col % m], if col < m { 1 } else { -1 }))
            .collect();
        active.sort();
        Ok(SubResult::Optimal {
            pi: pi.iter().copied().collect(),
            objective,
            active,
            pivots,
        })
    }

    // Dual infeasible: c has a component orthogonal to the row space of A,
    // and that component is a ray along which every constraint stays at 0.
    fn unbounded_ray(&self, c: &[f64], pivots: usize) -> Result<LpSolution> {
        let null = null_space(&self.matrix(), 1e-10);
        let mut ray = vec![0.0; c.len()];
        for v in &null {
            let proj: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            for (r, vi) in ray.iter_mut().zip(v) {
                *r += proj * vi;
            }
        }
        let gain: f64 = ray.iter().zip(c).map(|(a, b)| a * b).sum();
        if !(gain > 1e-12) {
            return Err(Error::Numerical("phase one infeasible but no improving ray found".into()));
        }
        Ok(LpSolution {
            status: LpStatus::Unbounded,
            value: f64::INFINITY,
            coeffs: ray,
            basis: self.basis,
            active: Vec::new(),
            pivots,
        })
    }
}

/// Orthonormal basis of `{a : A a = 0}` at relative tolerance `tol`.
pub(crate) fn null_space(a: &DMatrix<f64>, tol: f64) -> Vec<Vec<f64>> {
    let (m, n) = a.shape();
    let padded = if m < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    (0..n)
        .filter(|&k| svd.singular_values[k] <= tol * smax.max(f64::MIN_POSITIVE))
        .map(|k| vt.row(k).iter().copied().collect())
        .collect()
}

fn pivot(t: &mut [Vec<f64>], basic: &mut [usize], row: usize, col: usize) {
    let p = t[row][col];
    t[row].iter_mut().for_each(|v| *v /= p);
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col];
        if f != 0.0 {
            r.iter_mut().zip(&pivot_row).for_each(|(v, pv)| *v -= f * pv);
        }
    }
    basic[row] = col;
}

// Bland's rule: lowest-index entering column with negative reduced cost,
// lowest basic index among tied ratios. Columns `>= allowed` never enter.
// Both phases are bounded below, so a candidate column without a positive
// pivot only reflects roundoff in its reduced cost and is passed over.
fn run_simplex(t: &mut [Vec<f64>], basic: &mut [usize], allowed: usize) -> Result<usize> {
    let n_rows = basic.len();
    let rhs = t[0].len() - 1;
    let limit = 50 * (rhs + 1);
    for iter in 0..limit {
        let mut step = None;
        for enter in (0..rhs.min(allowed)).filter(|&j| t[n_rows][j] < -PIVOT_TOLERANCE) {
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..n_rows {
                let a = t[i][enter];
                if a > PIVOT_TOLERANCE {
                    let ratio = t[i][rhs] / a;
                    let wins = match leave {
                        None => true,
                        Some((li, lr)) => ratio < lr - 1e-14 || (ratio <= lr + 1e-14 && basic[i] < basic[li]),
                    };
                    if wins {
                        leave = Some((i, ratio));
                    }
                }
            }
            if let Some((row, _)) = leave {
                step = Some((row, enter));
                break;
            }
        }
        let Some((row, enter)) = step else {
            return Ok(iter);
        };
        pivot(t, basic, row, enter);
    }
    Err(Error::Numerical(format!("simplex exceeded {limit} pivots")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::generate_collinear;

    fn line(xs: &[f64]) -> PointSet {
        PointSet::new(1, xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    #[test]
    fn value_at_a_node_is_one() {
        let z = line(&[-1.0, -0.2, 0.4, 1.0]);
        let lp = RemezLp::new(&z, 3, Basis::Monomial).unwrap();
        for &x in &[-1.0, -0.2, 0.4, 1.0] {
            let s = lp.solve(&[x], 1.0).unwrap();
            assert!((s.value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn three_nodes_quadratic() {
        let z = line(&[-1.0, 0.0, 1.0]);
        let lp = RemezLp::new(&z, 2, Basis::Monomial).unwrap();
        let s = lp.solve(&[0.5], 1.0).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 1.25).abs() < 1e-12);
        assert_eq!(s.active.len(), 3);
        let p = s.polynomial(1, 2);
        for (j, sign) in &s.active {
            let zj = z.points()[*j][0];
            assert!((*sign as f64 * p.eval(&[zj]).unwrap() - 1.0).abs() < 1e-12);
        }
        let neg = lp.solve(&[0.5], -1.0).unwrap();
        assert!((neg.value - s.value).abs() < 1e-12);
    }

    #[test]
    fn collinear_points_are_unbounded() {
        let z = generate_collinear(3, &[0.0, 0.1], &[0.5, 0.25]).unwrap();
        let lp = RemezLp::new(&z, 1, Basis::Monomial).unwrap();
        let s = lp.solve(&[0.0, 0.9], 1.0).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
        let ray = s.polynomial(2, 1);
        for p in z.points() {
            assert!(ray.eval(p).unwrap().abs() < 1e-12);
        }
        assert!(ray.eval(&[0.0, 0.9]).unwrap() > 0.0);
    }

    #[test]
    fn bases_agree() {
        let z = line(&[-0.9, -0.5, -0.1, 0.2, 0.6, 0.95]);
        let mono = RemezLp::new(&z, 4, Basis::Monomial).unwrap();
        let cheb = RemezLp::new(&z, 4, Basis::Chebyshev).unwrap();
        for &x in &[-1.0, -0.7, 0.0, 0.8, 1.0] {
            let a = mono.solve(&[x], 1.0).unwrap().value;
            let b = cheb.solve(&[x], 1.0).unwrap().value;
            assert!((a - b).abs() < 1e-9 * a, "{a} vs {b}");
        }
    }
}
