//! The bump-function witness vanishing on `Z`.
//!
//! Starting from a polynomial `P` with `M_0(P) = 1` and small values on
//! `Z`, subtract `P(z_j) ψ((2/ρ)(x − z_j))` at every point. The supports
//! have radius `ρ/2`, so they are disjoint and the result vanishes on `Z`.

use serde::{Deserialize, Serialize};

use super::smooth::{bump_constant, derivative_norm, derivative_norm_seeded, Bump, SmoothFunction};
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::poly::{max_abs_on_ball, univariate_max_abs, MultiPoly};
use crate::remez::{is_norming, RANK_TOLERANCE};

/// Largest `|f(z_j)|` accepted for the witness.
pub const VANISHING_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperWitness {
    /// `f̂ = f / M_0(f)`.
    pub function: SmoothFunction,
    /// `M_{d+1}(f̂)`.
    pub derivative_norm: f64,
    pub derivative_witness: Vec<f64>,
    /// `r = max_Z |P|` after scaling `P` to `M_0(P) = 1`.
    pub max_on_z: f64,
    /// `M_0(f)` before renormalization; at least `1 − r`.
    pub m0_unnormalized: f64,
    pub max_residual: f64,
    pub rho: f64,
    pub bump_constant: f64,
    /// `C(n,d)/ρ^{d+1} · r/(1 − r)`, or `None` when `r ≥ 1`.
    pub theorem_bound: Option<f64>,
}

/// `sup_{B^n} |P|` and a point attaining it (to search accuracy).
pub fn ball_argmax(p: &MultiPoly) -> (f64, Vec<f64>) {
    let n = p.n();
    let mono = p.to_monomial();
    if n == 1 {
        let (v, t) = univariate_max_abs(mono.coeffs());
        return (v, vec![t]);
    }
    if p.degree_bound() <= 1 {
        let a = mono.coeff(&vec![0; n]);
        let grad: Vec<f64> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                mono.coeff(&e)
            })
            .collect();
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm == 0.0 {
            return (a.abs(), vec![0.0; n]);
        }
        let sign = if a >= 0.0 { 1.0 } else { -1.0 };
        let x: Vec<f64> = grad.iter().map(|g| sign * g / norm).collect();
        return (a.abs() + norm, x);
    }
    let r = max_abs_on_ball(p, 1.0 / 128.0, 40);
    (r.value, r.witness)
}

/// Builds `f̂` from `Z`, `d` and a polynomial of degree `≤ d`, and measures
/// `M_{d+1}(f̂)` on lattices of step `resolution`.
pub fn construct_upper_witness(z: &PointSet, d: usize, p: &MultiPoly, resolution: f64) -> Result<UpperWitness> {
    if p.n() != z.n() {
        return Err(Error::DimensionMismatch { expected: z.n(), got: p.n() });
    }
    if p.total_degree().is_some_and(|k| k > d) {
        return Err(Error::InvalidArgument(format!("witness polynomial has degree above {d}")));
    }
    if !is_norming(z, d, RANK_TOLERANCE) {
        return Err(Error::NotNorming { d });
    }
    let (sup, x_p) = ball_argmax(p);
    let sup = sup.max(p.eval(&x_p)?.abs());
    if !(sup > 0.0) {
        return Err(Error::InvalidArgument("witness polynomial is zero".into()));
    }
    let p = p.to_monomial().with_degree_bound(d).scaled(1.0 / sup);

    // A single point has no separation; any radius keeps the support
    // disjoint, and 2 keeps it inside B^n about the origin.
    let rho = z.rho().unwrap_or(2.0);
    let scale = 2.0 / rho;
    let mut max_on_z = 0.0f64;
    let bumps: Vec<Bump> = z
        .points()
        .iter()
        .map(|c| {
            let a = p.eval_unchecked(c);
            max_on_z = max_on_z.max(a.abs());
            Bump {
                center: c.clone(),
                amplitude: a,
                scale,
            }
        })
        .collect();
    let f = SmoothFunction::new(p, bumps, d + 2)?;

    let mut residual = 0.0f64;
    for c in z.points() {
        residual = residual.max(f.eval(c)?.abs());
    }
    if residual > VANISHING_TOLERANCE {
        return Err(Error::Numerical(format!("witness residual {residual} on Z")));
    }

    let m0 = derivative_norm_seeded(&f, 0, resolution, &[x_p])?.value;
    if m0 < 1.0 - max_on_z - 1e-9 {
        return Err(Error::Numerical(format!("M_0(f) = {m0} is below 1 − max_Z|P| = {}", 1.0 - max_on_z)));
    }
    if m0 <= 1e-12 {
        return Err(Error::Numerical("witness collapses to zero".into()));
    }
    let function = f.scaled(1.0 / m0);
    let top = derivative_norm(&function, d + 1, resolution)?;
    let c = bump_constant(z.n(), d, d + 2)?;
    let theorem_bound = (max_on_z < 1.0).then(|| c / rho.powi(d as i32 + 1) * max_on_z / (1.0 - max_on_z));
    Ok(UpperWitness {
        function,
        derivative_norm: top.value,
        derivative_witness: top.witness,
        max_on_z,
        m0_unnormalized: m0,
        max_residual: residual,
        rho,
        bump_constant: c,
        theorem_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub passed: bool,
    pub max_residual: f64,
    pub m0: f64,
    pub derivative_norm: f64,
    pub messages: Vec<String>,
}

/// Re-checks a stored witness against `Z`: vanishing, `M_0 ≈ 1`, and the
/// recorded `M_{d+1}` when given.
pub fn verify_witness(f: &SmoothFunction, z: &PointSet, d: usize, expected_norm: Option<f64>, resolution: f64) -> Result<WitnessCheck> {
    let mut messages = Vec::new();
    if f.n() != z.n() {
        return Err(Error::DimensionMismatch { expected: z.n(), got: f.n() });
    }
    let mut residual = 0.0f64;
    let mut worst = 0;
    for (i, c) in z.points().iter().enumerate() {
        let v = f.eval(c)?.abs();
        if v > residual {
            residual = v;
            worst = i;
        }
    }
    if residual > VANISHING_TOLERANCE {
        messages.push(format!("|f(z_{worst})| = {residual:e} exceeds {VANISHING_TOLERANCE:e}"));
    }
    if f.bumps().len() != z.len() {
        messages.push(format!("witness has {} bumps for {} points", f.bumps().len(), z.len()));
    }
    let m0 = derivative_norm(f, 0, resolution)?.value;
    if (m0 - 1.0).abs() > 1e-6 {
        messages.push(format!("M_0(f) = {m0} is not 1"));
    }
    let top = derivative_norm(f, d + 1, resolution)?.value;
    if let Some(e) = expected_norm {
        if (top - e).abs() > 1e-6 * e.abs().max(1.0) {
            messages.push(format!("M_{}(f) = {top} differs from the recorded {e}", d + 1));
        }
    }
    Ok(WitnessCheck {
        passed: messages.is_empty(),
        max_residual: residual,
        m0,
        derivative_norm: top,
        messages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_collinear, generate_triangle};

    #[test]
    fn triangle_witness() {
        let z = generate_triangle(0.1).unwrap();
        // P = 1 − 20y has |P| = 1 on Z and ball maximum 21 at (0, −1).
        let p = MultiPoly::from_terms(2, 1, &[(vec![0, 0], 1.0), (vec![0, 1], -20.0)]).unwrap();
        let w = construct_upper_witness(&z, 1, &p, 1.0 / 64.0).unwrap();
        assert!(w.max_residual <= VANISHING_TOLERANCE);
        assert!((w.max_on_z - 1.0 / 21.0).abs() < 1e-12);
        let theorem = w.theorem_bound.unwrap();
        assert!(w.derivative_norm <= theorem * (1.0 + 1e-3), "{} vs {theorem}", w.derivative_norm);
        assert!(w.derivative_norm >= 1.0 / 21.0);
        let check = verify_witness(&w.function, &z, 1, Some(w.derivative_norm), 1.0 / 64.0).unwrap();
        assert!(check.passed, "{:?}", check.messages);
    }

    #[test]
    fn rejects_degenerate_sets() {
        let z = generate_collinear(4, &[0.0, 0.0], &[0.5, 0.5]).unwrap();
        let p = MultiPoly::variable(2, 0);
        assert!(matches!(construct_upper_witness(&z, 1, &p, 0.1), Err(Error::NotNorming { d: 1 })));
    }

    #[test]
    fn perturbed_amplitude_fails_verification() {
        let z = PointSet::new(1, vec![vec![-0.6], vec![0.1], vec![0.7]]).unwrap();
        let p = MultiPoly::univariate(&[0.2, 0.5]);
        let w = construct_upper_witness(&z, 1, &p, 1.0 / 64.0).unwrap();
        let mut bumps = w.function.bumps().to_vec();
        bumps[1].amplitude += 1e-3;
        let bad = SmoothFunction::new(w.function.poly().clone(), bumps, w.function.exponent()).unwrap();
        let check = verify_witness(&bad, &z, 1, None, 1.0 / 64.0).unwrap();
        assert!(!check.passed);
        assert!(check.max_residual > 1e-4);
    }
}
