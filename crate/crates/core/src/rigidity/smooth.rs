//! Polynomials minus sums of compactly supported bumps, with exact
//! derivatives.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::ball::{ball_lattice, maximize_over_points, project_to_ball, sphere_sample};
use crate::poly::{multi_indices_of_order, BallSearch, MultiPoly};

/// `ψ(u) = (1 − ‖u‖²)_+^k` in `n` variables, with its partial derivatives
/// inside the support. `ψ` is `C^{k−1}` across the unit sphere.
#[derive(Debug)]
pub struct BumpProfile {
    n: usize,
    k: usize,
    psi: MultiPoly,
    partials: Mutex<HashMap<usize, Arc<Vec<MultiPoly>>>>,
}

impl BumpProfile {
    fn build(n: usize, k: usize) -> BumpProfile {
        let mut s = MultiPoly::zero(n, 2, crate::poly::Basis::Monomial);
        for i in 0..n {
            let xi = MultiPoly::variable(n, i);
            s = &s + &(&xi * &xi);
        }
        let one_minus = &MultiPoly::constant(n, 1.0) - &s;
        BumpProfile {
            n,
            k,
            psi: one_minus.pow(k),
            partials: Mutex::new(HashMap::new()),
        }
    }

    /// Shared profile for `(n, k)`.
    pub fn get(n: usize, k: usize) -> Arc<BumpProfile> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<BumpProfile>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        cache
            .lock()
            .expect("profile cache poisoned")
            .entry((n, k))
            .or_insert_with(|| Arc::new(BumpProfile::build(n, k)))
            .clone()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn exponent(&self) -> usize {
        self.k
    }

    pub fn polynomial(&self) -> &MultiPoly {
        &self.psi
    }

    /// `∂^α ψ` for every `|α| = l`, in [`multi_indices_of_order`] order.
    pub fn partials(&self, l: usize) -> Arc<Vec<MultiPoly>> {
        let mut guard = self.partials.lock().expect("partials cache poisoned");
        guard
            .entry(l)
            .or_insert_with(|| {
                Arc::new(
                    multi_indices_of_order(self.n, l)
                        .iter()
                        .map(|a| self.psi.partial_derivative(a))
                        .collect(),
                )
            })
            .clone()
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        let r2: f64 = u.iter().map(|v| v * v).sum();
        if r2 >= 1.0 {
            0.0
        } else {
            (1.0 - r2).powi(self.k as i32)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Vec<f64>,
    pub amplitude: f64,
    /// The bump is `amplitude · ψ(scale · (x − center))`, supported in the
    /// ball of radius `1/scale`.
    pub scale: f64,
}

/// `f(x) = P(x) − Σ_j a_j ψ(s_j (x − z_j))`.
#[derive(Clone, Debug)]
pub struct SmoothFunction {
    poly: MultiPoly,
    bumps: Vec<Bump>,
    exponent: usize,
    profile: Arc<BumpProfile>,
    index: SpatialIndex,
}

#[derive(Clone, Debug)]
struct SpatialIndex {
    cell: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl SpatialIndex {
    fn new(bumps: &[Bump]) -> SpatialIndex {
        let cell = bumps.iter().map(|b| 1.0 / b.scale).fold(0.0, f64::max).max(1e-300);
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (j, b) in bumps.iter().enumerate() {
            cells.entry(Self::key(cell, &b.center)).or_default().push(j);
        }
        SpatialIndex { cell, cells }
    }

    fn key(cell: f64, x: &[f64]) -> Vec<i64> {
        x.iter().map(|v| (v / cell).floor() as i64).collect()
    }

    // Bumps whose open support may contain `x`.
    fn near<'a>(&'a self, x: &[f64], mut visit: impl FnMut(usize)) {
        if self.cells.is_empty() {
            return;
        }
        let base = Self::key(self.cell, x);
        let n = base.len();
        let mut offset = vec![-1i64; n];
        loop {
            let key: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
            if let Some(list) = self.cells.get(&key) {
                list.iter().for_each(|&j| visit(j));
            }
            let mut i = 0;
            while i < n {
                offset[i] += 1;
                if offset[i] <= 1 {
                    break;
                }
                offset[i] = -1;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
}

impl PartialEq for SmoothFunction {
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly && self.bumps == other.bumps && self.exponent == other.exponent
    }
}

impl SmoothFunction {
    pub fn new(poly: MultiPoly, bumps: Vec<Bump>, exponent: usize) -> Result<SmoothFunction> {
        let n = poly.n();
        for b in &bumps {
            if b.center.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: b.center.len() });
            }
            if !(b.scale > 0.0 && b.scale.is_finite()) || !b.amplitude.is_finite() {
                return Err(Error::InvalidArgument(format!("bump needs positive finite scale, got {}", b.scale)));
            }
        }
        if exponent == 0 {
            return Err(Error::InvalidArgument("bump exponent must be positive".into()));
        }
        Ok(SmoothFunction {
            index: SpatialIndex::new(&bumps),
            profile: BumpProfile::get(n, exponent),
            poly,
            bumps,
            exponent,
        })
    }

    pub fn polynomial(p: MultiPoly) -> SmoothFunction {
        let k = p.degree_bound() + 2;
        SmoothFunction::new(p, Vec::new(), k).expect("valid without bumps")
    }

    pub fn n(&self) -> usize {
        self.poly.n()
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }

    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }

    pub fn exponent(&self) -> usize {
        self.exponent
    }

    /// Highest derivative order with a continuous value, or `None` for a
    /// pure polynomial.
    pub fn smoothness(&self) -> Option<usize> {
        (!self.bumps.is_empty()).then(|| self.exponent - 1)
    }

    pub fn scaled(&self, c: f64) -> SmoothFunction {
        let bumps = self
            .bumps
            .iter()
            .map(|b| Bump {
                amplitude: c * b.amplitude,
                ..b.clone()
            })
            .collect();
        SmoothFunction::new(self.poly.scaled(c), bumps, self.exponent).expect("scaling keeps validity")
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: x.len() });
        }
        let mut v = self.poly.eval_unchecked(x);
        self.index.near(x, |j| {
            let b = &self.bumps[j];
            let u: Vec<f64> = x.iter().zip(&b.center).map(|(a, c)| b.scale * (a - c)).collect();
            v -= b.amplitude * self.profile.eval(&u);
        });
        Ok(v)
    }

    fn check_order(&self, l: usize) -> Result<()> {
        match self.smoothness() {
            Some(limit) if l > limit => Err(Error::SmoothnessExceeded { order: l, limit }),
            _ => Ok(()),
        }
    }

    /// `Σ_{|α| = l} |∂^α f|` as a closure over points of `R^n`.
    pub fn derivative_sum(&self, l: usize) -> Result<impl Fn(&[f64]) -> f64 + Sync + '_> {
        self.check_order(l)?;
        let alphas = multi_indices_of_order(self.n(), l);
        let poly_parts: Vec<MultiPoly> = alphas.iter().map(|a| self.poly.partial_derivative(a)).collect();
        let bump_parts = self.profile.partials(l);
        Ok(move |x: &[f64]| {
            let mut vals: Vec<f64> = poly_parts.iter().map(|p| p.eval_unchecked(x)).collect();
            self.index.near(x, |j| {
                let b = &self.bumps[j];
                let u: Vec<f64> = x.iter().zip(&b.center).map(|(a, c)| b.scale * (a - c)).collect();
                if u.iter().map(|v| v * v).sum::<f64>() >= 1.0 {
                    return;
                }
                let factor = b.amplitude * b.scale.powi(l as i32);
                for (v, q) in vals.iter_mut().zip(bump_parts.iter()) {
                    *v -= factor * q.eval_unchecked(&u);
                }
            });
            vals.iter().map(|v| v.abs()).sum()
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SmoothFunctionJson {
    poly: MultiPoly,
    bumps: Vec<Bump>,
    exponent: usize,
}

impl Serialize for SmoothFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SmoothFunctionJson {
            poly: self.poly.to_monomial(),
            bumps: self.bumps.clone(),
            exponent: self.exponent,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SmoothFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = SmoothFunctionJson::deserialize(deserializer)?;
        SmoothFunction::new(raw.poly, raw.bumps, raw.exponent).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub witness: Vec<f64>,
}

/// Points where `Σ_{|α|=l} |∂^α ψ|` is largest on the unit ball: the best
/// point found and its images under coordinate permutations and sign flips.
fn hot_spots(profile: &BumpProfile, l: usize) -> Arc<Vec<Vec<f64>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize, usize), Arc<Vec<Vec<f64>>>>>> = OnceLock::new();
    let key = (profile.n, profile.k, l);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().expect("poisoned").get(&key) {
        return v.clone();
    }
    let best = profile_maximum(profile, l);
    let spots = Arc::new(orbit(&best.witness));
    cache.lock().expect("poisoned").insert(key, spots.clone());
    spots
}

fn orbit(x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut perms: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..n {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..n).filter(|i| !p.contains(i)).map(|i| [p.clone(), vec![i]].concat()).collect::<Vec<_>>()
            })
            .collect();
    }
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in &perms {
        for mask in 0..1usize << n {
            let y: Vec<f64> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { -x[p[i]] } else { x[p[i]] })
                .collect();
            if !out.contains(&y) {
                out.push(y);
            }
        }
    }
    out
}

// Lattice step per dimension; the ascent supplies the remaining digits.
fn profile_resolution(n: usize) -> f64 {
    match n {
        1 => 1.0 / 256.0,
        2 => 1.0 / 64.0,
        _ => 1.0 / 16.0,
    }
}

fn profile_maximum(profile: &BumpProfile, l: usize) -> NormEstimate {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize, usize), NormEstimate>>> = OnceLock::new();
    let key = (profile.n, profile.k, l);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().expect("poisoned").get(&key) {
        return v.clone();
    }
    let resolution = profile_resolution(profile.n);
    let parts = profile.partials(l);
    let g = |u: &[f64]| -> f64 {
        if u.iter().map(|v| v * v).sum::<f64>() > 1.0 {
            return 0.0;
        }
        parts.iter().map(|q| q.eval_unchecked(u).abs()).sum()
    };
    let search = BallSearch {
        resolution,
        refine_steps: 60,
        ..Default::default()
    };
    let r = crate::poly::maximize_over_ball(profile.n, g, &search, &[]);
    let best = NormEstimate {
        value: r.value,
        witness: r.witness,
    };
    cache.lock().expect("poisoned").insert(key, best.clone());
    best
}

/// `M_l(ψ)` for `ψ = (1 − ‖u‖²)_+^k`.
pub fn profile_derivative_norm(n: usize, k: usize, l: usize) -> Result<f64> {
    if l >= k {
        return Err(Error::SmoothnessExceeded { order: l, limit: k - 1 });
    }
    Ok(profile_maximum(&BumpProfile::get(n, k), l).value)
}

/// `C(n, d) = 2^{d+1} · M_{d+1}(ψ)` for the profile with exponent `k ≥ d+2`.
pub fn bump_constant(n: usize, d: usize, k: usize) -> Result<f64> {
    if k < d + 2 {
        return Err(Error::InvalidArgument(format!("bump exponent {k} must be at least d + 2 = {}", d + 2)));
    }
    Ok(2f64.powi(d as i32 + 1) * profile_derivative_norm(n, k, d + 1)?)
}

/// Lower estimate of `M_l(f) = max_{B^n} Σ_{|α|=l} |∂^α f|`, each distinct
/// multi-index counted once.
///
/// Candidates are a lattice with the given step, the hot spots of every
/// bump, and `seeds`; the best of them are refined by local ascent.
pub fn derivative_norm(f: &SmoothFunction, l: usize, resolution: f64) -> Result<NormEstimate> {
    derivative_norm_seeded(f, l, resolution, &[])
}

pub fn derivative_norm_seeded(f: &SmoothFunction, l: usize, resolution: f64, seeds: &[Vec<f64>]) -> Result<NormEstimate> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidArgument(format!("resolution must be positive, got {resolution}")));
    }
    let g = f.derivative_sum(l)?;
    let n = f.n();
    let search = BallSearch::with_resolution(resolution);
    let level = search.finest_level();
    let mut candidates = ball_lattice(n, level);
    candidates.extend(sphere_sample(n, level));
    candidates.extend(seeds.iter().cloned());
    let mut step = 1.0 / (1u64 << level) as f64;
    if !f.bumps.is_empty() {
        let spots = hot_spots(&f.profile, l);
        let centers = f.bumps.iter().flat_map(|b| {
            spots.iter().map(move |u| {
                let mut x: Vec<f64> = b.center.iter().zip(u).map(|(c, v)| c + v / b.scale).collect();
                project_to_ball(&mut x);
                x
            })
        });
        candidates.extend(centers);
        let radius = f.bumps.iter().map(|b| 1.0 / b.scale).fold(f64::INFINITY, f64::min);
        step = step.min(radius / 4.0);
    }
    let (value, witness, _) = maximize_over_points(&g, &candidates, step, &search);
    Ok(NormEstimate { value, witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_basics() {
        let p = BumpProfile::get(2, 3);
        assert_eq!(p.polynomial().eval(&[0.0, 0.0]).unwrap(), 1.0);
        assert!((p.polynomial().eval(&[0.3, 0.4]).unwrap() - 0.75f64.powi(3)).abs() < 1e-15);
        assert_eq!(p.eval(&[0.8, 0.8]), 0.0);
    }

    #[test]
    fn profile_derivative_examples() {
        let m = profile_derivative_norm(1, 3, 1).unwrap();
        let exact = 6.0 / 5f64.sqrt() * 0.64;
        assert!((m - exact).abs() < 1e-9, "{m} vs {exact}");
        let c = bump_constant(1, 0, 2).unwrap();
        let exact = 2.0 * 4.0 / 3f64.sqrt() * 2.0 / 3.0;
        assert!((c - exact).abs() < 1e-9, "{c} vs {exact}");
        assert!(matches!(profile_derivative_norm(1, 3, 3), Err(Error::SmoothnessExceeded { .. })));
        for n in 1..=3 {
            for d in 0..=4 {
                let c = bump_constant(n, d, d + 2).unwrap();
                assert!(c.is_finite() && c > 0.0);
            }
        }
    }

    #[test]
    fn polynomial_derivative_norms() {
        let cubic = MultiPoly::univariate(&[0.0, 0.0, 0.0, 1.0]);
        let f = SmoothFunction::polynomial(cubic);
        assert!((derivative_norm(&f, 3, 0.1).unwrap().value - 6.0).abs() < 1e-12);
        assert_eq!(derivative_norm(&f, 4, 0.1).unwrap().value, 0.0);
    }

    #[test]
    fn bump_scaling_law() {
        // ψ(c u) has M_1 scaled by c.
        let c = 4.0;
        let f = SmoothFunction::new(
            MultiPoly::constant(1, 0.0),
            vec![Bump { center: vec![0.0], amplitude: -1.0, scale: c }],
            3,
        )
        .unwrap();
        let m = derivative_norm(&f, 1, 0.05).unwrap().value;
        let base = profile_derivative_norm(1, 3, 1).unwrap();
        assert!((m - c * base).abs() < 1e-9 * m, "{m} vs {}", c * base);
        assert_eq!(f.eval(&[0.0]).unwrap(), 1.0);
        assert_eq!(f.eval(&[0.3]).unwrap(), 0.0);
    }

    #[test]
    fn json_round_trip() {
        let f = SmoothFunction::new(
            MultiPoly::univariate(&[0.5, -1.0]),
            vec![Bump { center: vec![0.25], amplitude: 0.25, scale: 8.0 }],
            3,
        )
        .unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let g: SmoothFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }
}
