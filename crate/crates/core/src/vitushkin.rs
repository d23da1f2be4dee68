//! Vitushkin polynomials and the covering invariant `ω_d`.
//!
//! `M_{n,d}(ε)` bounds the number of l∞ cubes of radius `ε` needed to cover
//! the sublevel sets of degree-`d` polynomials in the unit cube. The
//! invariant
//!
//! ```text
//! ω_d(Z) = sup_{ε > 0} ε^n · (M(ε, Z) − M_{n,d}(ε))
//! ```
//!
//! measures how far a finite set is from being coverable like such a
//! sublevel set. Here `M(ε, Z)` is the l∞ covering number with closed cubes
//! of side `2ε`.
//!
//! ```
//! use smooth_rigidity::vitushkin::vitushkin_value;
//! assert_eq!(vitushkin_value(2, 3, 0.5), 73.0);
//! ```

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{exact_covering_number, linf_distance, CoveringMode, FarthestFirst, PointSet};
use crate::poly::real_roots_in;

/// Label recorded in every report that depends on covering numbers.
pub const COVERING_CONVENTION: &str = "linf-closed-cube-radius-eps-side-2eps";

/// Upper end of the `ε` range. Beyond the l∞ diameter of the ball every
/// finite set is covered by one cube while `M_{n,d} ≥ 1`.
pub const EPS_MAX: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VitushkinPolynomial {
    pub n: usize,
    pub d: usize,
    /// `C_0, …, C_{n−1}`, coefficients of the powers of `1/ε`.
    pub coeffs: Vec<f64>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl VitushkinPolynomial {
    pub fn new(n: usize, d: usize) -> Result<VitushkinPolynomial> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidArgument(format!("Vitushkin polynomial needs n, d ≥ 1, got n={n}, d={d}")));
        }
        let df = d as f64;
        let coeffs = match n {
            1 => vec![df],
            2 => vec![(2.0 * df - 1.0).powi(2), 8.0 * df],
            _ => (0..n)
                .map(|i| {
                    if i == 0 {
                        1.0
                    } else if d <= i {
                        0.0
                    } else {
                        2f64.powi(i as i32) * binomial(n, i) * ((d - i) as f64).powi(i as i32)
                    }
                })
                .collect(),
        };
        Ok(VitushkinPolynomial { n, d, coeffs })
    }

    pub fn eval(&self, eps: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| if i == 0 { c } else { c / eps.powi(i as i32) })
            .sum()
    }

    /// Ascending coefficients in `ε` of `ε^n · (k − M_{n,d}(ε))`.
    fn excess_poly(&self, k: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.n + 1];
        out[self.n] = k;
        for (i, c) in self.coeffs.iter().enumerate() {
            out[self.n - i] -= c;
        }
        out
    }
}

/// `M_{n,d}(ε)`. Panics unless `n, d ≥ 1`.
pub fn vitushkin_value(n: usize, d: usize, eps: f64) -> f64 {
    VitushkinPolynomial::new(n, d).expect("n and d must be positive").eval(eps)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoughBound {
    pub value: f64,
    /// False for `ε > 1`, where the domination is not established.
    pub proven: bool,
}

/// `(4d)^n · ε^{1−n}`, an upper bound on `M_{n,d}(ε)` for `0 < ε ≤ 1`.
pub fn rough_vitushkin_bound(n: usize, d: usize, eps: f64) -> RoughBound {
    RoughBound {
        value: (4.0 * d as f64).powi(n as i32) * eps.powi(1 - n as i32),
        proven: eps <= 1.0,
    }
}

/// Geometric grid of `ε` values added to the candidate set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Default for EpsGrid {
    fn default() -> Self {
        EpsGrid {
            min: 1e-4,
            max: EPS_MAX,
            count: 64,
        }
    }
}

impl EpsGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.min > 0.0 && self.min < self.max && self.max <= EPS_MAX) {
            return Err(Error::InvalidArgument(format!(
                "eps grid needs 0 < min < max ≤ {EPS_MAX}, got {}:{}",
                self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.max],
            c => {
                let ratio = (self.max / self.min).ln();
                (0..c)
                    .map(|i| {
                        if i + 1 == c {
                            self.max
                        } else {
                            self.min * (ratio * i as f64 / (c - 1) as f64).exp()
                        }
                    })
                    .collect()
            }
        }
    }
}

impl FromStr for EpsGrid {
    type Err = Error;

    /// Parses `min:max:count`.
    fn from_str(s: &str) -> Result<EpsGrid> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidArgument(format!("eps grid must look like min:max:count, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let grid = EpsGrid {
            min: parts[0].trim().parse().map_err(|_| bad())?,
            max: parts[1].trim().parse().map_err(|_| bad())?,
            count: parts[2].trim().parse().map_err(|_| bad())?,
        };
        grid.validate()?;
        Ok(grid)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaOptions {
    pub grid: EpsGrid,
    /// Exact covering numbers are used for the estimate when allowed.
    pub covering: CoveringMode,
    pub trace: bool,
}

impl Default for OmegaOptions {
    fn default() -> Self {
        OmegaOptions {
            grid: EpsGrid::default(),
            covering: CoveringMode::default(),
            trace: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaCandidate {
    pub eps: f64,
    /// Evaluated as the limit from below with the counts left of `eps`.
    pub left_limit: bool,
    pub packing: usize,
    pub cover: usize,
    pub certified: f64,
    pub estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaResult {
    pub n: usize,
    pub d: usize,
    /// Lower bound on `ω_d(Z)` from packing numbers. May be negative.
    pub certified: f64,
    pub certified_eps: f64,
    /// Same sweep with exact (or greedy) covering numbers.
    pub estimate: f64,
    pub estimate_eps: f64,
    pub exact_counts: bool,
    pub candidates: usize,
    pub convention: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<OmegaCandidate>>,
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * t + v)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, &v)| k as f64 * v).collect()
}

// Larger value wins, ties go to the smaller eps.
fn improves(v: f64, eps: f64, best: (f64, f64)) -> bool {
    v > best.0 || (v == best.0 && eps < best.1)
}

/// Certified and heuristic sweep of `ε ↦ ε^n (M(ε, Z) − M_{n,d}(ε))`.
///
/// The counting functions are step functions, constant on half-open pieces
/// `[b_k, b_{k+1})` between their breakpoints. On each piece the objective
/// is a polynomial in `ε`, so its supremum is attained at an endpoint (the
/// right one as a limit from below) or at a critical point. These are all
/// evaluated, together with the geometric grid.
pub fn omega(z: &PointSet, d: usize, opts: &OmegaOptions) -> Result<OmegaResult> {
    let vp = VitushkinPolynomial::new(z.n(), d)?;
    opts.grid.validate()?;
    let (lo, hi) = (opts.grid.min, opts.grid.max);
    let ff = FarthestFirst::new(z);
    let exact = match opts.covering {
        CoveringMode::Exact { threshold } => z.len() <= threshold.min(64),
        CoveringMode::Bounds => false,
    };

    let mut breaks: Vec<f64> = ff.radii().iter().map(|r| r / 2.0).collect();
    if exact {
        let pts = z.points();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                breaks.push(linf_distance(&pts[i], &pts[j]) / 2.0);
            }
        }
    } else {
        breaks.extend_from_slice(ff.radii());
    }
    let mut knots = vec![lo];
    knots.extend(breaks.into_iter().filter(|&b| b > lo && b < hi));
    knots.push(hi);
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    let counts = |eps: f64| -> (usize, usize) {
        if z.is_empty() {
            return (0, 0);
        }
        let cover = if exact { exact_covering_number(z, eps) } else { ff.cover(eps) };
        (ff.packing(eps), cover)
    };
    let make = |eps: f64, left_limit: bool, (packing, cover): (usize, usize)| OmegaCandidate {
        eps,
        left_limit,
        packing,
        cover,
        certified: horner(&vp.excess_poly(packing as f64), eps),
        estimate: horner(&vp.excess_poly(cover as f64), eps),
    };

    let piece_counts: Vec<(usize, usize)> = knots.par_iter().map(|&b| counts(b)).collect();
    let mut cands: Vec<OmegaCandidate> = (0..knots.len() - 1)
        .into_par_iter()
        .flat_map_iter(|k| {
            let (a, b) = (knots[k], knots[k + 1]);
            let c = piece_counts[k];
            let mut out = vec![make(a, false, c), make(b, true, c)];
            let mut crit: Vec<f64> = [c.0, c.1]
                .iter()
                .flat_map(|&m| real_roots_in(&derivative(&vp.excess_poly(m as f64)), a, b))
                .filter(|&t| t > a && t < b)
                .collect();
            crit.sort_by(f64::total_cmp);
            crit.dedup();
            out.extend(crit.into_iter().map(|t| make(t, false, c)));
            out
        })
        .collect();
    cands.push(make(hi, false, piece_counts[knots.len() - 1]));
    for eps in opts.grid.points() {
        let k = knots.partition_point(|&b| b <= eps) - 1;
        cands.push(make(eps, false, piece_counts[k]));
    }
    cands.sort_by(|x, y| x.eps.total_cmp(&y.eps).then(y.left_limit.cmp(&x.left_limit)));

    let mut cert = (f64::NEG_INFINITY, f64::INFINITY);
    let mut est = (f64::NEG_INFINITY, f64::INFINITY);
    for c in &cands {
        if improves(c.certified, c.eps, cert) {
            cert = (c.certified, c.eps);
        }
        if improves(c.estimate, c.eps, est) {
            est = (c.estimate, c.eps);
        }
    }
    Ok(OmegaResult {
        n: z.n(),
        d,
        certified: cert.0,
        certified_eps: cert.1,
        estimate: est.0,
        estimate_eps: est.1,
        exact_counts: exact,
        candidates: cands.len(),
        convention: COVERING_CONVENTION.to_string(),
        trace: opts.trace.then_some(cands),
    })
}

/// True iff the `ω` estimates are non-increasing over `degrees`, up to a
/// relative tie tolerance of `1e-12`.
pub fn omega_monotonicity_check(
    z: &PointSet,
    degrees: std::ops::RangeInclusive<usize>,
    opts: &OmegaOptions,
) -> Result<bool> {
    if *degrees.start() == 0 || *degrees.end() > 6 {
        return Err(Error::InvalidArgument(format!(
            "degree range must lie in [1, 6], got {}..={}",
            degrees.start(),
            degrees.end()
        )));
    }
    let values = degrees
        .map(|d| omega(z, d, opts).map(|r| r.estimate))
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0)))
}
