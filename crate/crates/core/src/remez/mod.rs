//! Remez constants of finite sets.
//!
//! `R_d(Z)` is the smallest `K` with `sup_B |P| ≤ K · sup_Z |P|` for every
//! polynomial of degree `≤ d`. For fixed `x` the best ratio at `x` is a
//! linear program ([`RemezLp`]); the supremum over `x` is searched from
//! below on nested lattices. Upper bounds come only from the measure and
//! `ω` formulas, never from the search.
//!
//! ```
//! use smooth_rigidity::geometry::generate_triangle;
//! use smooth_rigidity::remez::{remez_constant, RemezOptions};
//!
//! let z = generate_triangle(0.5).unwrap();
//! let est = remez_constant(&z, 1, &RemezOptions::default()).unwrap();
//! assert!((est.lower - 5.0).abs() < 1e-6);
//! ```

mod lp;
mod oracle;

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, PointSet};
use crate::poly::{chebyshev_value, maximize_over_ball, max_abs_on_ball, monomial_count, Basis, BallSearch, MultiPoly};
use crate::vitushkin::{omega, OmegaOptions};

pub use lp::{LpSolution, LpStatus, RemezLp, PIVOT_TOLERANCE};
pub use oracle::{ball_sup, vertex_oracle, OracleValue, ORACLE_MAX_COEFFS, ORACLE_MAX_POINTS};

/// Relative singular-value cutoff of the rank test.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Whether the evaluation matrix of `Z` has full column rank, i.e. no
/// nonzero polynomial of degree `≤ d` vanishes on `Z`.
pub fn is_norming(z: &PointSet, d: usize, tol: f64) -> bool {
    let Ok(n_coeffs) = monomial_count(z.n(), d) else {
        return false;
    };
    if z.len() < n_coeffs {
        return false;
    }
    let basis = Basis::default_for_degree(d);
    match RemezLp::new(z, d, basis) {
        Ok(lp) => lp::null_space(&lp.matrix(), tol).is_empty(),
        Err(_) => false,
    }
}

/// A nonzero polynomial of degree `≤ d` vanishing on `Z` (to roundoff),
/// normalized so that its largest coefficient is one in absolute value.
pub fn vanishing_polynomial(z: &PointSet, d: usize) -> Result<Option<MultiPoly>> {
    let basis = Basis::default_for_degree(d);
    let lp = RemezLp::new(z, d, basis)?;
    let null = lp::null_space(&lp.matrix(), RANK_TOLERANCE);
    let Some(v) = null.into_iter().next() else {
        return Ok(None);
    };
    let scale = v.iter().fold(0.0f64, |m, c| if c.abs() > m.abs() { *c } else { m });
    let coeffs = v.iter().map(|c| c / scale).collect();
    Ok(Some(MultiPoly::from_coeffs(z.n(), d, basis, coeffs)?.to_monomial()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemezStatus {
    Finite,
    Infinite,
    /// Rank test and linear program disagree.
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemezEstimate {
    pub status: RemezStatus,
    /// Lower bound on `R_d(Z)`; `+∞` (written as null) when infinite.
    pub lower: f64,
    pub oracle: Option<f64>,
    /// Proven upper bound on `R_d(Z)` from the oracle's vertices.
    pub oracle_upper: Option<f64>,
    /// Upper bound on `R_d(Z)` from the certified `ω` value.
    pub upper_omega: Option<f64>,
    /// For finite status `max_Z |P| ≤ 1` and `P(x*) = lower`; for infinite
    /// status a polynomial vanishing on `Z`.
    pub witness_poly: Option<MultiPoly>,
    pub witness_point: Option<Vec<f64>>,
    /// `1 / R`, from the oracle when present and from `lower` otherwise.
    pub rhat: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemezOptions {
    pub search: BallSearch,
    /// Defaults to monomials up to degree 6, Chebyshev above.
    pub basis: Option<Basis>,
    /// Run the vertex oracle when the instance is within budget.
    pub oracle: bool,
    /// Attach the `ω` upper bound.
    pub omega: Option<OmegaOptions>,
    /// Extra points evaluated at every search level.
    pub seeds: Vec<Vec<f64>>,
}

impl Default for RemezOptions {
    fn default() -> Self {
        RemezOptions {
            search: BallSearch::default(),
            basis: None,
            oracle: false,
            omega: None,
            seeds: Vec::new(),
        }
    }
}

/// Memoized LP values keyed by the exact bits of the evaluation point.
///
/// The search lattices are nested, so every coarse point recurs at each
/// finer level. Hits return the stored value unchanged.
#[derive(Debug, Default)]
pub struct LpCache {
    inner: Mutex<HashMap<(u64, usize, Basis, Vec<u64>), f64>>,
}

impl LpCache {
    pub fn new() -> LpCache {
        LpCache::default()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get_or_insert(&self, key: (u64, usize, Basis, Vec<u64>), f: impl FnOnce() -> Result<f64>) -> Result<f64> {
        if let Some(v) = self.inner.lock().expect("cache poisoned").get(&key) {
            return Ok(*v);
        }
        let v = f()?;
        self.inner.lock().expect("cache poisoned").insert(key, v);
        Ok(v)
    }
}

// Solves in the preferred basis and falls back to the other one on
// numerical failure.
fn solve_robust(primary: &RemezLp, fallback: &RemezLp, x: &[f64]) -> Result<LpSolution> {
    match primary.solve(x, 1.0) {
        Ok(s) => Ok(s),
        Err(Error::Numerical(first)) => fallback
            .solve(x, 1.0)
            .map_err(|second| Error::Numerical(format!("{first}; retry in the other basis: {second}"))),
        Err(e) => Err(e),
    }
}

/// Best ratio `sup { P(x) : |P| ≤ 1 on Z }` at a single point.
pub fn lp_max_at_point(z: &PointSet, d: usize, x: &[f64], sign: f64) -> Result<LpSolution> {
    let basis = Basis::default_for_degree(d);
    RemezLp::new(z, d, basis)?.solve(x, sign)
}

pub fn remez_constant(z: &PointSet, d: usize, opts: &RemezOptions) -> Result<RemezEstimate> {
    remez_constant_cached(z, d, opts, &LpCache::new())
}

pub fn remez_constant_cached(z: &PointSet, d: usize, opts: &RemezOptions, cache: &LpCache) -> Result<RemezEstimate> {
    let n = z.n();
    if !is_norming(z, d, RANK_TOLERANCE) {
        let witness = vanishing_polynomial(z, d)?.unwrap_or_else(|| MultiPoly::constant(n, 1.0).with_degree_bound(d));
        let point = max_abs_on_ball(&witness, 0.125, 20).witness;
        return Ok(RemezEstimate {
            status: RemezStatus::Infinite,
            lower: f64::INFINITY,
            oracle: None,
            oracle_upper: None,
            upper_omega: None,
            witness_poly: Some(witness),
            witness_point: Some(point),
            rhat: Some(0.0),
        });
    }
    let basis = opts.basis.unwrap_or_else(|| Basis::default_for_degree(d));
    let other = match basis {
        Basis::Monomial => Basis::Chebyshev,
        Basis::Chebyshev => Basis::Monomial,
    };
    let primary = RemezLp::new(z, d, basis)?;
    let fallback = RemezLp::new(z, d, other)?;
    let hash = z.content_hash();

    let failure: Mutex<Option<Error>> = Mutex::new(None);
    let value_at = |x: &[f64]| -> f64 {
        let key = (hash, d, basis, x.iter().map(|v| v.to_bits()).collect());
        match cache.get_or_insert(key, || solve_robust(&primary, &fallback, x).map(|s| s.value)) {
            Ok(v) => v,
            Err(e) => {
                failure.lock().expect("poisoned").get_or_insert(e);
                f64::NEG_INFINITY
            }
        }
    };
    let best = maximize_over_ball(n, value_at, &opts.search, &opts.seeds);
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    if best.value.is_infinite() {
        // The rank test passed but some LP reported a ray.
        return Ok(RemezEstimate {
            status: RemezStatus::Indeterminate,
            lower: 1.0,
            oracle: None,
            oracle_upper: None,
            upper_omega: None,
            witness_poly: None,
            witness_point: Some(best.witness),
            rhat: None,
        });
    }
    let sol = solve_robust(&primary, &fallback, &best.witness)?;
    let witness_poly = sol.polynomial(n, d);
    let lower = sol.value;

    let oracle = if opts.oracle {
        match vertex_oracle(z, d) {
            Ok(o) => Some((o.value.max(lower), o.upper.max(lower))),
            Err(Error::OracleBudget(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let (oracle, oracle_upper) = (oracle.map(|o| o.0), oracle.map(|o| o.1));
    let upper_omega = match &opts.omega {
        Some(o) => remez_upper_from_omega(n, d, omega(z, d, o)?.certified),
        None => None,
    };
    Ok(RemezEstimate {
        status: RemezStatus::Finite,
        lower,
        oracle,
        oracle_upper,
        upper_omega,
        witness_poly: Some(witness_poly),
        witness_point: Some(best.witness),
        rhat: Some(1.0 / oracle.unwrap_or(lower)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureBound {
    pub chebyshev: f64,
    pub power: f64,
}

/// Upper bounds on `R_d(Z)` for measurable `Z ⊂ B^n` with
/// `m_n(Z) = λ · m_n(B^n)`: `T_d((1 + s)/(1 − s))` with `s = (1 − λ)^{1/n}`,
/// and the cruder `(4n/λ)^d`. Both are `+∞` at `λ = 0`.
pub fn remez_upper_bound_measure(lambda: f64, n: usize, d: usize) -> Result<MeasureBound> {
    if !(0.0..=1.0).contains(&lambda) || n == 0 {
        return Err(Error::InvalidArgument(format!("need 0 ≤ λ ≤ 1 and n ≥ 1, got λ={lambda}, n={n}")));
    }
    if lambda == 0.0 {
        return Ok(MeasureBound {
            chebyshev: f64::INFINITY,
            power: f64::INFINITY,
        });
    }
    let s = (1.0 - lambda).powf(1.0 / n as f64);
    Ok(MeasureBound {
        chebyshev: chebyshev_value(d, (1.0 + s) / (1.0 - s)),
        power: (4.0 * n as f64 / lambda).powi(d as i32),
    })
}

/// `(4n/λ̄)^d` with `λ̄ = ω / m_n(B^n)`; `None` unless `ω > 0`.
pub fn remez_upper_from_omega(n: usize, d: usize, omega_certified: f64) -> Option<f64> {
    if !(omega_certified > 0.0) {
        return None;
    }
    let lambda_bar = omega_certified / unit_ball_volume(n);
    Some((4.0 * n as f64 / lambda_bar).powi(d as i32))
}

/// `count` cosine-spaced nodes on `[a, b]`, in increasing order. Includes
/// both endpoints and the images of all extrema of `T_k` whenever `k`
/// divides `count − 1`.
pub fn discretized_interval_set(a: f64, b: f64, count: usize) -> Result<PointSet> {
    if !(-1.0 <= a && a < b && b <= 1.0) || count < 2 {
        return Err(Error::InvalidArgument(format!(
            "need −1 ≤ a < b ≤ 1 and count ≥ 2, got [{a}, {b}] with {count} nodes"
        )));
    }
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    let points = (0..count)
        .map(|k| {
            let t = -(std::f64::consts::PI * k as f64 / (count - 1) as f64).cos();
            let x = if k == 0 {
                a
            } else if k + 1 == count {
                b
            } else {
                mid + half * t
            };
            vec![x]
        })
        .collect();
    PointSet::new(1, points)
}
