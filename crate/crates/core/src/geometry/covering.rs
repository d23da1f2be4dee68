//! Covering and packing numbers in the l∞ metric.
//!
//! A closed l∞ ball of radius `ε` is an axis-aligned cube of side `2ε`. A
//! finite set fits into one such cube iff every coordinate spread is at most
//! `2ε`, which is the same as all pairwise l∞ distances being `≤ 2ε`. All
//! comparisons below go through that one test so the exact, greedy and
//! packing numbers agree on borderline pairs.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::PointSet;
use crate::error::{Error, Result};

pub const DEFAULT_EXACT_THRESHOLD: usize = 24;

pub fn linf_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoveringMode {
    /// Exact minimum by branch and bound, refused above `threshold` points.
    Exact { threshold: usize },
    /// Packing lower bound and greedy upper bound.
    Bounds,
}

impl Default for CoveringMode {
    fn default() -> Self {
        CoveringMode::Exact {
            threshold: DEFAULT_EXACT_THRESHOLD,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringResult {
    pub eps: f64,
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
}

/// Farthest-first traversal in the l∞ metric, started at the first point.
///
/// The insertion radii `r_1 ≥ r_2 ≥ …` give, for every `ε`, a packing (the
/// prefix whose radii exceed `2ε`) and a cover by cubes centred at the
/// prefix whose radii exceed `ε`. Both counts are monotone in `ε`.
#[derive(Clone, Debug)]
pub struct FarthestFirst {
    radii: Vec<f64>,
}

impl FarthestFirst {
    pub fn new(z: &PointSet) -> FarthestFirst {
        let pts = z.points();
        if pts.is_empty() {
            return FarthestFirst { radii: Vec::new() };
        }
        let mut dist: Vec<f64> = pts.iter().map(|p| linf_distance(&pts[0], p)).collect();
        let mut taken = vec![false; pts.len()];
        taken[0] = true;
        let mut radii = Vec::with_capacity(pts.len() - 1);
        for _ in 1..pts.len() {
            let mut pick = usize::MAX;
            for j in 0..pts.len() {
                if !taken[j] && (pick == usize::MAX || dist[j] > dist[pick]) {
                    pick = j;
                }
            }
            taken[pick] = true;
            radii.push(dist[pick]);
            for j in 0..pts.len() {
                if !taken[j] {
                    dist[j] = dist[j].min(linf_distance(&pts[pick], &pts[j]));
                }
            }
        }
        FarthestFirst { radii }
    }

    /// Non-increasing insertion radii.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    fn count_above(&self, threshold: f64) -> usize {
        self.radii.partition_point(|&r| r > threshold)
    }

    /// Size of a subset with pairwise l∞ distances `> 2ε`.
    pub fn packing(&self, eps: f64) -> usize {
        1 + self.count_above(2.0 * eps)
    }

    /// Number of radius-`ε` cubes in the traversal cover.
    pub fn cover(&self, eps: f64) -> usize {
        1 + self.count_above(eps)
    }
}

pub fn packing_lower_bound(z: &PointSet, eps: f64) -> usize {
    if z.is_empty() {
        return 0;
    }
    FarthestFirst::new(z).packing(eps)
}

pub fn greedy_cover_upper_bound(z: &PointSet, eps: f64) -> usize {
    if z.is_empty() {
        return 0;
    }
    FarthestFirst::new(z).cover(eps)
}

pub fn covering_number(z: &PointSet, eps: f64, mode: CoveringMode) -> Result<CoveringResult> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("covering radius must be positive, got {eps}")));
    }
    let bounds = || {
        if z.is_empty() {
            return CoveringResult { eps, lower: 0, upper: 0, exact: true };
        }
        let ff = FarthestFirst::new(z);
        let (lower, upper) = (ff.packing(eps), ff.cover(eps));
        CoveringResult { eps, lower, upper, exact: lower == upper }
    };
    match mode {
        CoveringMode::Bounds => Ok(bounds()),
        CoveringMode::Exact { threshold } => {
            if z.len() > threshold.min(64) {
                return Err(Error::ExactCoverRefused {
                    size: z.len(),
                    threshold,
                    fallback: bounds(),
                });
            }
            let m = exact_covering_number(z, eps);
            Ok(CoveringResult { eps, lower: m, upper: m, exact: true })
        }
    }
}

/// Maximal sets coverable by one cube, as bitmasks over the points.
///
/// Any coverable set is covered by a cube whose lower corner has, in each
/// coordinate, the smallest coordinate of the set, so anchoring candidate
/// cubes at point coordinates loses nothing.
fn candidate_cubes(z: &PointSet, eps: f64) -> Vec<u64> {
    let pts = z.points();
    let n = z.n();
    let width = 2.0 * eps;
    let axis_masks: Vec<Vec<u64>> = (0..n)
        .map(|k| {
            let mut anchors: Vec<f64> = pts.iter().map(|p| p[k]).collect();
            anchors.sort_by(|a, b| a.total_cmp(b));
            anchors.dedup();
            let mut masks: Vec<u64> = anchors
                .iter()
                .map(|&a| {
                    pts.iter()
                        .enumerate()
                        .filter(|(_, p)| p[k] >= a && p[k] - a <= width)
                        .fold(0u64, |m, (j, _)| m | (1 << j))
                })
                .collect();
            masks.dedup();
            masks
        })
        .collect();

    let mut found = HashSet::new();
    fn rec(k: usize, acc: u64, axis: &[Vec<u64>], found: &mut HashSet<u64>) {
        if acc == 0 {
            return;
        }
        if k == axis.len() {
            found.insert(acc);
            return;
        }
        for &m in &axis[k] {
            rec(k + 1, acc & m, axis, found);
        }
    }
    let full = if pts.len() == 64 { u64::MAX } else { (1u64 << pts.len()) - 1 };
    rec(0, full, &axis_masks, &mut found);

    let mut masks: Vec<u64> = found.into_iter().collect();
    masks.sort_by(|a, b| b.count_ones().cmp(&a.count_ones()).then(a.cmp(b)));
    let mut maximal: Vec<u64> = Vec::new();
    for m in masks {
        if !maximal.iter().any(|&big| big & m == m) {
            maximal.push(m);
        }
    }
    maximal
}

/// Exact minimal number of closed radius-`eps` l∞ cubes covering `z`.
/// Intended for small sets (at most 64 points).
pub fn exact_covering_number(z: &PointSet, eps: f64) -> usize {
    let m = z.len();
    assert!(m <= 64, "exact covering supports at most 64 points");
    if m == 0 {
        return 0;
    }
    let cubes = candidate_cubes(z, eps);
    let containing: Vec<Vec<usize>> = (0..m)
        .map(|j| (0..cubes.len()).filter(|&c| cubes[c] >> j & 1 == 1).collect())
        .collect();
    let largest = cubes.iter().map(|c| c.count_ones()).max().unwrap_or(1);
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };

    // Greedy start for the incumbent.
    let mut uncovered = full;
    let mut best = 0;
    while uncovered != 0 {
        let pick = cubes.iter().max_by_key(|&&c| ((c & uncovered).count_ones(), std::cmp::Reverse(c))).unwrap();
        uncovered &= !pick;
        best += 1;
    }

    struct Search<'a> {
        cubes: &'a [u64],
        containing: &'a [Vec<usize>],
        largest: u32,
        best: usize,
    }
    impl Search<'_> {
        fn run(&mut self, uncovered: u64, used: usize) {
            if uncovered == 0 {
                self.best = self.best.min(used);
                return;
            }
            let bound = used + uncovered.count_ones().div_ceil(self.largest) as usize;
            if bound >= self.best {
                return;
            }
            // Branch on the uncovered point with the fewest covering cubes.
            let mut pivot = usize::MAX;
            let mut bits = uncovered;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if pivot == usize::MAX || self.containing[j].len() < self.containing[pivot].len() {
                    pivot = j;
                }
            }
            let mut options: Vec<u64> = self.containing[pivot].iter().map(|&c| self.cubes[c]).collect();
            options.sort_by_key(|&c| (std::cmp::Reverse((c & uncovered).count_ones()), c));
            for c in options {
                self.run(uncovered & !c, used + 1);
            }
        }
    }
    let mut search = Search {
        cubes: &cubes,
        containing: &containing,
        largest,
        best,
    };
    search.run(full, 0);
    search.best
}
