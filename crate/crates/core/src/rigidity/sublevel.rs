//! Sublevel sets `{|P| ≤ γ}`: small inverse Remez constant, yet interior.

use serde::{Deserialize, Serialize};

use super::bounds::{interior_lower, rigidity_lower_main1, Provenance};
use super::witness::ball_argmax;
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::poly::{BallSearch, MultiPoly};
use crate::remez::{remez_constant, RemezOptions};

/// Allowed excess of the sampled `R̂` over `γ`.
pub const SUBLEVEL_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SublevelRecord {
    pub gamma: f64,
    pub size: usize,
    /// Search value of `R_d` on the sample.
    pub remez_lower: f64,
    /// `1 / remez_lower`, an overestimate of `R̂_d`.
    pub rhat_estimate: f64,
    pub rhat_within: bool,
    pub interior_lower: f64,
    pub main1_at_gamma: f64,
    /// `interior_lower > main1_at_gamma`.
    pub gap: bool,
}

/// Lattice points of step `resolution` in `B^n` where `|P| ≤ γ`.
pub fn sublevel_sample(p: &MultiPoly, gamma: f64, resolution: f64) -> Result<PointSet> {
    if !(resolution > 0.0 && resolution <= 1.0) {
        return Err(Error::InvalidArgument(format!("resolution must lie in (0, 1], got {resolution}")));
    }
    let n = p.n();
    let k = (1.0 / resolution).round() as i64;
    let mut points = Vec::new();
    let mut idx = vec![-k; n];
    loop {
        let x: Vec<f64> = idx.iter().map(|&i| i as f64 / k as f64).collect();
        if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 && p.eval(&x)?.abs() <= gamma {
            points.push(x);
        }
        let mut i = 0;
        while i < n {
            idx[i] += 1;
            if idx[i] <= k {
                break;
            }
            idx[i] = -k;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument(format!("no lattice point has |P| ≤ {gamma}")));
    }
    PointSet::new(n, points)
}

/// Samples the `γ`-sublevel set of `P` (with `sup_B |P| = 1`) and compares
/// its sampled `R̂` with `γ`, and `interior_lower` with the inverse-Remez
/// bound at `R̂ = γ`.
pub fn sublevel_example(p: &MultiPoly, gamma: f64, resolution: f64) -> Result<(PointSet, SublevelRecord)> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!("γ must lie in (0, 1), got {gamma}")));
    }
    let d = p.total_degree().unwrap_or(0);
    let z = sublevel_sample(p, gamma, resolution)?;
    let (_, argmax) = ball_argmax(p);
    let opts = RemezOptions {
        // The seed already certifies R ≥ 1/γ; the search only improves on it.
        search: BallSearch {
            resolution: 0.25,
            refine_steps: 20,
            starts: 4,
        },
        seeds: vec![argmax],
        ..Default::default()
    };
    let est = remez_constant(&z, d, &opts)?;
    let rhat = 1.0 / est.lower;
    let interior = interior_lower(d);
    let main1 = rigidity_lower_main1(gamma, Provenance::Estimate, d).value;
    let record = SublevelRecord {
        gamma,
        size: z.len(),
        remez_lower: est.lower,
        rhat_estimate: rhat,
        rhat_within: rhat <= gamma + SUBLEVEL_TOLERANCE,
        interior_lower: interior,
        main1_at_gamma: main1,
        gap: interior > main1,
    };
    Ok((z, record))
}
