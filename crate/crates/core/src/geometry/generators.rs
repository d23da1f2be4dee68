//! Example point-set families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::PointSet;
use crate::error::{Error, Result};

fn axis_values(lo: f64, len: f64, h: f64) -> Vec<f64> {
    let steps = (len / h + 1e-9).floor() as usize;
    (0..=steps).map(|i| lo + i as f64 * h).collect()
}

/// Regular grid of step `h`.
///
/// For `n = 1` the points are `-1 + ih` in `[-1, 1]`. For `n ≥ 2` the grid
/// fills the inscribed cube `[-1/√n, 1/√n]^n`, starting at its lower corner.
pub fn generate_grid(n: usize, h: f64) -> Result<PointSet> {
    if !(h > 0.0) || n == 0 {
        return Err(Error::InvalidArgument(format!("grid needs h > 0 and n ≥ 1, got h={h}, n={n}")));
    }
    let half = if n == 1 { 1.0 } else { 1.0 / (n as f64).sqrt() };
    let axis = axis_values(-half, 2.0 * half, h);
    let total = axis.len().pow(n as u32);
    let mut points = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rest = flat;
        let mut p = vec![0.0; n];
        for slot in (0..n).rev() {
            p[slot] = axis[rest % axis.len()];
            rest /= axis.len();
        }
        pull_inside(&mut p);
        points.push(p);
    }
    PointSet::new(n, points)
}

// Corners of the inscribed cube can exceed unit norm by an ulp.
fn pull_inside(p: &mut [f64]) {
    let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 1.0 {
        p.iter_mut().for_each(|v| *v /= norm);
    }
}

/// [`generate_grid`] with every point moved by an independent uniform
/// random vector of norm `≤ jitter`. Displacements that would leave the
/// unit ball are redrawn, so the minimal separation stays `≥ h − 2·jitter`.
pub fn generate_near_grid(n: usize, h: f64, jitter: f64, seed: u64) -> Result<PointSet> {
    if jitter < 0.0 || jitter > h / 10.0 + 1e-15 {
        return Err(Error::InvalidArgument(format!(
            "jitter {jitter} must lie in [0, h/10] = [0, {}]",
            h / 10.0
        )));
    }
    let grid = generate_grid(n, h)?;
    if jitter == 0.0 {
        return Ok(grid);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = grid
        .points()
        .iter()
        .map(|z| loop {
            let v: Vec<f64> = loop {
                let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                    break v;
                }
            };
            let moved: Vec<f64> = z.iter().zip(&v).map(|(a, b)| a + jitter * b).collect();
            if moved.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                break moved;
            }
        })
        .collect();
    PointSet::new(n, points)
}

/// The planar triangle `{(-1/2, 0), (0, h), (1/2, 0)}`.
pub fn generate_triangle(h: f64) -> Result<PointSet> {
    if !(h > 0.0 && h <= 0.5) {
        return Err(Error::InvalidArgument(format!("triangle height must lie in (0, 1/2], got {h}")));
    }
    PointSet::new(2, vec![vec![-0.5, 0.0], vec![0.0, h], vec![0.5, 0.0]])
}

/// `m` equally spaced points on the circle of radius `r` centred at `c`.
/// Every such set lies on a conic, the zero set of a quadratic.
pub fn generate_circle(m: usize, r: f64, c: [f64; 2], phase: f64) -> Result<PointSet> {
    let points = (0..m)
        .map(|j| {
            let t = phase + std::f64::consts::TAU * j as f64 / m as f64;
            vec![c[0] + r * t.cos(), c[1] + r * t.sin()]
        })
        .collect();
    PointSet::new(2, points)
}

/// `m` points `base + t_j · dir` with `t_j` equally spaced in `[-1, 1]`.
pub fn generate_collinear(m: usize, base: &[f64], dir: &[f64]) -> Result<PointSet> {
    if base.len() != dir.len() {
        return Err(Error::DimensionMismatch { expected: base.len(), got: dir.len() });
    }
    let points = (0..m)
        .map(|j| {
            let t = if m == 1 { 0.0 } else { -1.0 + 2.0 * j as f64 / (m - 1) as f64 };
            base.iter().zip(dir).map(|(b, v)| b + t * v).collect()
        })
        .collect();
    PointSet::new(base.len(), points)
}
