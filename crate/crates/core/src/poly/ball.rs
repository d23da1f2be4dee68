//! Deterministic lower-bound maximization over the closed unit ball.
//!
//! The search runs on nested dyadic lattices: level `j` uses step `2^-j`
//! over `[-1, 1]^n` filtered to `‖x‖₂ ≤ 1`, plus a boundary sample of the
//! same density. Each level is followed by projected coordinate ascent from
//! its best cells, and the reported value is the maximum over all levels up
//! to the requested resolution. Finer resolutions therefore never return a
//! smaller value.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MultiPoly;

const MAX_LEVEL: u32 = 16;
// Accepted moves per step length before the step is halved anyway.
const MOVES_PER_STEP: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallSearch {
    /// Lattice step; rounded down to the next power of two.
    pub resolution: f64,
    /// Number of step halvings in each local ascent.
    pub refine_steps: usize,
    /// Number of best lattice cells each ascent level starts from.
    pub starts: usize,
}

impl Default for BallSearch {
    fn default() -> Self {
        BallSearch {
            resolution: 0.02,
            refine_steps: 40,
            starts: 16,
        }
    }
}

impl BallSearch {
    pub fn with_resolution(resolution: f64) -> Self {
        BallSearch {
            resolution,
            ..Default::default()
        }
    }

    pub(crate) fn finest_level(&self) -> u32 {
        assert!(self.resolution > 0.0, "resolution must be positive");
        let k = (1.0 / self.resolution).log2().ceil();
        (k.max(1.0) as u32).min(MAX_LEVEL)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallMaxResult {
    pub value: f64,
    pub witness: Vec<f64>,
    /// Lattice step actually used at the finest level.
    pub resolution: f64,
    /// Accepted ascent moves plus step halvings, summed over all starts.
    pub iterations: usize,
}

/// Lattice points of step `2^-level` inside the closed unit ball.
pub(crate) fn ball_lattice(n: usize, level: u32) -> Vec<Vec<f64>> {
    let m = 1i64 << level;
    let h = 1.0 / m as f64;
    let mut out = Vec::new();
    let mut current = vec![0.0; n];
    fn rec(slot: usize, norm2: f64, m: i64, h: f64, current: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if slot == current.len() {
            out.push(current.clone());
            return;
        }
        for i in -m..=m {
            let v = i as f64 * h;
            let nn = norm2 + v * v;
            if nn <= 1.0 + 1e-15 {
                current[slot] = v;
                rec(slot + 1, nn, m, h, current, out);
            }
        }
        current[slot] = 0.0;
    }
    rec(0, 0.0, m, h, &mut current, &mut out);
    out
}

/// Boundary sample matching the lattice density of `level`.
pub(crate) fn sphere_sample(n: usize, level: u32) -> Vec<Vec<f64>> {
    match n {
        1 => Vec::new(), // ±1 are lattice points
        2 => {
            let count = 1usize << (level + 3);
            (0..count)
                .map(|j| {
                    let theta = std::f64::consts::TAU * j as f64 / count as f64;
                    vec![theta.cos(), theta.sin()]
                })
                .collect()
        }
        _ => {
            // Cube-surface lattice points projected radially.
            let m = 1i64 << level;
            let h = 1.0 / m as f64;
            let total = (2 * m + 1) as usize;
            let count = total.pow(n as u32);
            let mut out = Vec::new();
            for flat in 0..count {
                let mut rest = flat;
                let mut x = Vec::with_capacity(n);
                let mut on_face = false;
                for _ in 0..n {
                    let i = (rest % total) as i64 - m;
                    rest /= total;
                    on_face |= i.abs() == m;
                    x.push(i as f64 * h);
                }
                if on_face {
                    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    x.iter_mut().for_each(|v| *v /= norm);
                    out.push(x);
                }
            }
            out
        }
    }
}

pub(crate) fn project_to_ball(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 1.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

// Larger value wins; exact ties go to the lexicographically smaller point.
fn better(a: (f64, &[f64]), b: (f64, &[f64])) -> bool {
    if a.0 != b.0 {
        return a.0 > b.0;
    }
    a.1.iter().zip(b.1).find(|(x, y)| x != y).is_some_and(|(x, y)| x < y)
}

fn ascend<F>(f: &F, mut x: Vec<f64>, mut value: f64, mut step: f64, halvings: usize) -> (f64, Vec<f64>, usize)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x.len();
    let mut iterations = 0;
    let mut halved = 0;
    let mut moves = 0;
    while halved < halvings {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for i in 0..n {
            for sign in [1.0, -1.0] {
                let mut cand = x.clone();
                cand[i] += sign * step;
                project_to_ball(&mut cand);
                let v = f(&cand);
                let improves = v > value && best.as_ref().is_none_or(|(bv, bx)| better((v, &cand), (*bv, bx)));
                if improves {
                    best = Some((v, cand));
                }
            }
        }
        iterations += 1;
        match best {
            Some((v, cand)) if moves < MOVES_PER_STEP => {
                value = v;
                x = cand;
                moves += 1;
            }
            _ => {
                step *= 0.5;
                halved += 1;
                moves = 0;
            }
        }
    }
    (value, x, iterations)
}

/// Evaluates `f` on `candidates`, then ascends from the best `search.starts`
/// of them with initial step `step`.
pub(crate) fn maximize_over_points<F>(f: &F, candidates: &[Vec<f64>], step: f64, search: &BallSearch) -> (f64, Vec<f64>, usize)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let values: Vec<f64> = candidates.par_iter().map(|x| f(x)).collect();
    let mut order: Vec<usize> = (0..candidates.len()).filter(|&i| values[i].is_finite()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order.truncate(search.starts.max(1));
    let ascents: Vec<(f64, Vec<f64>, usize)> = order
        .par_iter()
        .map(|&i| ascend(f, candidates[i].clone(), values[i], step, search.refine_steps))
        .collect();

    let mut best_value = f64::NEG_INFINITY;
    let mut best_x: Vec<f64> = candidates.first().cloned().unwrap_or_default();
    for (i, x) in candidates.iter().enumerate() {
        if values[i].is_finite() && better((values[i], x), (best_value, &best_x)) {
            best_value = values[i];
            best_x = x.clone();
        }
    }
    let mut iterations = 0;
    for (v, x, it) in ascents {
        iterations += it;
        if better((v, &x), (best_value, &best_x)) {
            best_value = v;
            best_x = x;
        }
    }
    (best_value, best_x, iterations)
}

/// Lower bound on `sup_{‖x‖₂ ≤ 1} f(x)` by nested lattice search and local
/// ascent. `seeds` are evaluated at every level alongside the lattice.
pub fn maximize_over_ball<F>(n: usize, f: F, search: &BallSearch, seeds: &[Vec<f64>]) -> BallMaxResult
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let finest = search.finest_level();
    let mut best_value = f64::NEG_INFINITY;
    let mut best_x = vec![0.0; n];
    let mut iterations = 0;
    for level in 1..=finest {
        let mut points = ball_lattice(n, level);
        points.extend(sphere_sample(n, level));
        points.extend(seeds.iter().cloned());
        let step = 1.0 / (1u64 << level) as f64;
        let (v, x, it) = maximize_over_points(&f, &points, step, search);
        iterations += it;
        if better((v, &x), (best_value, &best_x)) {
            best_value = v;
            best_x = x;
        }
    }
    BallMaxResult {
        value: best_value,
        witness: best_x,
        resolution: 1.0 / (1u64 << finest) as f64,
        iterations,
    }
}

/// Lower bound on `sup_{B^n} |p|`.
pub fn max_abs_on_ball(p: &MultiPoly, resolution: f64, refine_steps: usize) -> BallMaxResult {
    let search = BallSearch {
        resolution,
        refine_steps,
        ..Default::default()
    };
    if p.is_zero() {
        return BallMaxResult {
            value: 0.0,
            witness: vec![0.0; p.n()],
            resolution: 1.0 / (1u64 << search.finest_level()) as f64,
            iterations: 0,
        };
    }
    maximize_over_ball(p.n(), |x| p.eval_unchecked(x).abs(), &search, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Basis;
    use rand::{Rng, SeedableRng};

    #[test]
    fn constant_polynomial() {
        let p = MultiPoly::constant(2, -3.5);
        let r = max_abs_on_ball(&p, 0.1, 10);
        assert_eq!(r.value, 3.5);
    }

    #[test]
    fn affine_on_disk_matches_closed_form() {
        // max |a + bx + cy| on the disk is |a| + sqrt(b² + c²).
        let (a, b, c) = (0.3, -1.1, 0.7);
        let p = MultiPoly::from_terms(2, 1, &[(vec![0, 0], a), (vec![1, 0], b), (vec![0, 1], c)]).unwrap();
        let r = max_abs_on_ball(&p, 0.01, 40);
        let exact = a.abs() + (b * b + c * c).sqrt();
        assert!((r.value - exact).abs() < 1e-6, "{} vs {}", r.value, exact);
        let norm: f64 = r.witness.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm <= 1.0 + 1e-12);
        assert!((p.eval(&r.witness).unwrap().abs() - r.value).abs() < 1e-14);
    }

    #[test]
    fn chebyshev_cubic_equioscillates() {
        let p = MultiPoly::chebyshev_in(1, 3, 0);
        let r = max_abs_on_ball(&p, 0.05, 40);
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!([-1.0, -0.5, 0.5, 1.0].iter().any(|w| (w - r.witness[0]).abs() < 1e-6));
    }

    #[test]
    fn lower_bound_soundness_and_monotonicity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for trial in 0..4 {
            let n = 2 + trial % 2;
            let len = crate::poly::monomial_count(n, 3).unwrap();
            let coeffs: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p = MultiPoly::from_coeffs(n, 3, Basis::Monomial, coeffs).unwrap();
            let coarse = max_abs_on_ball(&p, 0.25, 20);
            let fine = max_abs_on_ball(&p, if n == 2 { 0.03 } else { 0.1 }, 20);
            assert!(fine.value >= coarse.value);
            for _ in 0..500 {
                let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                project_to_ball(&mut x);
                assert!(p.eval(&x).unwrap().abs() <= fine.value + 1e-12);
            }
        }
    }

    #[test]
    fn lattice_levels_are_nested() {
        let coarse = ball_lattice(2, 2);
        let fine = ball_lattice(2, 3);
        for p in &coarse {
            assert!(fine.contains(p));
        }
        assert!(fine.iter().all(|p| p[0] * p[0] + p[1] * p[1] <= 1.0 + 1e-15));
    }
}
