//! Closed-form rigidity bounds and the inequality checks built on
//! derivative norms.

use serde::{Deserialize, Serialize};

use super::smooth::{derivative_norm, SmoothFunction};
use crate::error::{Error, Result};
use crate::geometry::PointSet;

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// A proven bound, up to the floating-point evaluation of its formula.
    Certified,
    /// A computed value that is not guaranteed to lie on the bound side.
    Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub provenance: Provenance,
    pub source: String,
}

impl Bound {
    pub fn new(value: f64, provenance: Provenance, source: impl Into<String>) -> Bound {
        Bound {
            value,
            provenance,
            source: source.into(),
        }
    }

    pub fn is_certified(&self) -> bool {
        self.provenance == Provenance::Certified
    }
}

/// `(d+1)!/2 · R̂`. The result is certified only when `rhat` is a proven
/// lower bound on `R̂_d(Z) = 1/R_d(Z)`.
pub fn rigidity_lower_main1(rhat: f64, provenance: Provenance, d: usize) -> Bound {
    Bound::new(factorial(d + 1) / 2.0 * rhat, provenance, "inverse-remez")
}

/// Whether `M > (4d)^n ρ^{1−n}` holds for the Euclidean separation `ρ`.
pub fn grid_hypothesis(m: usize, n: usize, d: usize, rho: f64) -> bool {
    let threshold = (4.0 * d as f64).powi(n as i32) * rho.powi(1 - n as i32);
    m as f64 > threshold
}

/// `(d+1)!/2 · ((Mρ^n − (4d)^n ρ) / 4n)^d` when the cardinality hypothesis
/// holds, `None` otherwise.
pub fn rigidity_lower_grid(z: &PointSet, d: usize) -> Option<f64> {
    let rho = z.rho()?;
    let (m, n) = (z.len(), z.n());
    if !grid_hypothesis(m, n, d, rho) {
        return None;
    }
    let inner = (m as f64 * rho.powi(n as i32) - (4.0 * d as f64).powi(n as i32) * rho) / (4.0 * n as f64);
    Some(factorial(d + 1) / 2.0 * inner.powi(d as i32))
}

/// `((d+1)!/2 · (λ/4n)^d, (d+1)!/2 · (λ̄/4n)^d)`, in increasing order.
pub fn rigidity_lower_measure(lambda: f64, lambda_bar: f64, d: usize, n: usize) -> Result<(f64, f64)> {
    if !(0.0 <= lambda && lambda <= lambda_bar && lambda_bar <= 1.0) || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "need 0 ≤ λ ≤ λ̄ ≤ 1 and n ≥ 1, got λ={lambda}, λ̄={lambda_bar}, n={n}"
        )));
    }
    let f = |l: f64| factorial(d + 1) / 2.0 * (l / (4.0 * n as f64)).powi(d as i32);
    Ok((f(lambda), f(lambda_bar)))
}

/// `(d+1)!/2^{d+1}`, valid for sets with interior.
pub fn interior_lower(d: usize) -> f64 {
    factorial(d + 1) / 2f64.powi(d as i32 + 1)
}

/// `(d+1)! / (2(d+2))^{d+1} · h^{−(d+1)}`, valid for the grid
/// `{−1 + ih : 0 ≤ i ≤ ⌊2/h⌋}`.
pub fn univariate_grid_lower(d: usize, h: f64) -> f64 {
    factorial(d + 1) / (2.0 * (d + 2) as f64).powi(d as i32 + 1) * h.powi(-(d as i32 + 1))
}

/// The step `h` if `Z ⊂ [−1, 1]` is exactly `{−1 + ih : 0 ≤ i ≤ ⌊2/h⌋}`.
pub fn arithmetic_grid_step(z: &PointSet) -> Option<f64> {
    if z.n() != 1 || z.len() < 2 {
        return None;
    }
    let mut xs: Vec<f64> = z.points().iter().map(|p| p[0]).collect();
    xs.sort_by(f64::total_cmp);
    let h = xs[1] - xs[0];
    let tol = 1e-9 * h.max(1e-300);
    let on_grid = (xs[0] + 1.0).abs() <= tol && xs.iter().enumerate().all(|(i, x)| (x - (-1.0 + i as f64 * h)).abs() <= 1e-9);
    let count = (2.0 / h + 1e-9).floor() as usize + 1;
    (on_grid && xs.len() == count).then_some(h)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnivariateCheck {
    pub passed: bool,
    pub m0: f64,
    pub m_top: f64,
    /// `M_{d+1}(f) / M_0(f)`.
    pub ratio: f64,
    pub bound: f64,
}

const ZERO_TOLERANCE: f64 = 1e-9;

fn univariate_ratio(f: &SmoothFunction, d: usize, bound: f64, resolution: f64) -> Result<UnivariateCheck> {
    let m0 = derivative_norm(f, 0, resolution)?.value;
    if !(m0 > 0.0) {
        return Err(Error::Hypothesis("f vanishes identically".into()));
    }
    let m_top = derivative_norm(f, d + 1, resolution)?.value;
    let ratio = m_top / m0;
    Ok(UnivariateCheck {
        passed: ratio >= bound * (1.0 - 1e-3),
        m0,
        m_top,
        ratio,
        bound,
    })
}

/// Checks `M_{d+1}(f) ≥ (d+1)!/2^{d+1} · M_0(f)` for a function on
/// `[−1, 1]` with at least `d + 1` distinct zeros among `zeros`.
pub fn univariate_rigidity_check(f: &SmoothFunction, d: usize, zeros: &[f64], resolution: f64) -> Result<UnivariateCheck> {
    if f.n() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: f.n() });
    }
    let mut distinct: Vec<f64> = Vec::new();
    for &x in zeros {
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::Hypothesis(format!("zero {x} lies outside [-1, 1]")));
        }
        let v = f.eval(&[x])?;
        if v.abs() > ZERO_TOLERANCE {
            return Err(Error::Hypothesis(format!("f({x}) = {v} is not zero")));
        }
        if !distinct.contains(&x) {
            distinct.push(x);
        }
    }
    if distinct.len() < d + 1 {
        return Err(Error::Hypothesis(format!("{} distinct zeros, need {}", distinct.len(), d + 1)));
    }
    univariate_ratio(f, d, interior_lower(d), resolution)
}

/// Checks the grid bound for `f` vanishing on `{−1 + ih}`.
pub fn univariate_grid_check(f: &SmoothFunction, d: usize, h: f64, resolution: f64) -> Result<UnivariateCheck> {
    if f.n() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: f.n() });
    }
    if !(h > 0.0 && h <= 2.0) {
        return Err(Error::InvalidArgument(format!("grid step must lie in (0, 2], got {h}")));
    }
    let count = (2.0 / h + 1e-9).floor() as usize + 1;
    for i in 0..count {
        let x = -1.0 + i as f64 * h;
        let v = f.eval(&[x])?;
        if v.abs() > ZERO_TOLERANCE {
            return Err(Error::Hypothesis(format!("f({x}) = {v} is not zero")));
        }
    }
    univariate_ratio(f, d, univariate_grid_lower(d, h), resolution)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemezValueKind {
    Exact,
    /// A proven upper bound on `R_k(Z)`.
    CertifiedUpper,
    /// A search value, which bounds `R_k(Z)` from below only.
    LowerOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemezValue {
    pub k: usize,
    pub value: f64,
    pub kind: RemezValueKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothRemezTerm {
    pub k: usize,
    pub remez: f64,
    /// `R_k(f) = M_{k+1}(f) / (k+1)!`.
    pub remainder: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothRemezCheck {
    pub holds: bool,
    pub m0: f64,
    /// `L = max_Z |f|`.
    pub max_on_z: f64,
    pub terms: Vec<SmoothRemezTerm>,
    /// `min_k rhs − M_0`.
    pub slack: f64,
}

/// Checks `M_0(f) ≤ min_k [R_k(Z)(L + R_k(f)) + R_k(f)]` over the supplied
/// `R_k(Z)` values, with relative tolerance `1e−6`.
pub fn smooth_remez_check(f: &SmoothFunction, z: &PointSet, values: &[RemezValue], resolution: f64) -> Result<SmoothRemezCheck> {
    if z.n() != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), got: z.n() });
    }
    if values.is_empty() {
        return Err(Error::InvalidArgument("no Remez values supplied".into()));
    }
    if let Some(v) = values.iter().find(|v| v.kind == RemezValueKind::LowerOnly) {
        return Err(Error::Certification(format!(
            "R_{} = {} is only a lower bound and cannot certify the inequality",
            v.k, v.value
        )));
    }
    let m0 = derivative_norm(f, 0, resolution)?.value;
    let mut max_on_z = 0.0f64;
    for p in z.points() {
        max_on_z = max_on_z.max(f.eval(p)?.abs());
    }
    let mut terms = Vec::with_capacity(values.len());
    for v in values {
        let remainder = derivative_norm(f, v.k + 1, resolution)?.value / factorial(v.k + 1);
        terms.push(SmoothRemezTerm {
            k: v.k,
            remez: v.value,
            remainder,
            rhs: v.value * (max_on_z + remainder) + remainder,
        });
    }
    let best = terms.iter().map(|t| t.rhs).fold(f64::INFINITY, f64::min);
    Ok(SmoothRemezCheck {
        holds: m0 <= best * (1.0 + 1e-6),
        m0,
        max_on_z,
        terms,
        slack: best - m0,
    })
}

/// `(d+1)! · M_0 / (R_d(Z) + 1)`, the least `M_{d+1}` of a function that
/// vanishes on `Z`.
pub fn vanishing_derivative_lower(remez: f64, d: usize, m0: f64) -> f64 {
    factorial(d + 1) * m0 / (remez + 1.0)
}
