//! Finite point sets in the closed unit ball.

mod covering;
mod generators;
mod io;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use covering::{
    covering_number, exact_covering_number, greedy_cover_upper_bound, linf_distance, packing_lower_bound,
    CoveringMode, CoveringResult, FarthestFirst, DEFAULT_EXACT_THRESHOLD,
};
pub use generators::{
    generate_circle, generate_collinear, generate_grid, generate_near_grid, generate_triangle,
};

/// Points may exceed the unit norm by this much to absorb roundoff in
/// generated coordinates such as `1/√n`.
pub const BALL_TOLERANCE: f64 = 1e-12;

/// A finite set of distinct points `Z ⊂ B^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    n: usize,
    points: Vec<Vec<f64>>,
    rho: Option<f64>,
}

/// Lebesgue measure `m_n(B^n)` of the unit ball.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => std::f64::consts::TAU / n as f64 * unit_ball_volume(n - 2),
    }
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl PointSet {
    pub fn new(n: usize, points: Vec<Vec<f64>>) -> Result<PointSet> {
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("point {} has a non-finite coordinate", i)));
            }
            let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1.0 + BALL_TOLERANCE {
                return Err(Error::OutsideBall { index: i, norm });
            }
        }
        let mut rho: Option<f64> = None;
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let dist = euclidean_distance(&points[i], &points[j]);
                if dist == 0.0 {
                    return Err(Error::DuplicatePoint { first: i, second: j });
                }
                rho = Some(rho.map_or(dist, |r| r.min(dist)));
            }
        }
        Ok(PointSet { n, points, rho })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Cached minimal Euclidean distance, `None` for fewer than two points.
    pub fn rho(&self) -> Option<f64> {
        self.rho
    }

    /// Minimal pairwise Euclidean distance.
    pub fn min_separation(&self) -> Result<f64> {
        self.rho.ok_or(Error::SeparationUndefined(self.len()))
    }

    /// Minimal pairwise l∞ distance.
    pub fn linf_min_separation(&self) -> Result<f64> {
        if self.len() < 2 {
            return Err(Error::SeparationUndefined(self.len()));
        }
        let mut best = f64::INFINITY;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                best = best.min(linf_distance(&self.points[i], &self.points[j]));
            }
        }
        Ok(best)
    }

    pub fn subset(&self, indices: &[usize]) -> Result<PointSet> {
        PointSet::new(self.n, indices.iter().map(|&i| self.points[i].clone()).collect())
    }

    pub fn with_point(&self, p: Vec<f64>) -> Result<PointSet> {
        let mut pts = self.points.clone();
        pts.push(p);
        PointSet::new(self.n, pts)
    }

    pub fn scaled(&self, c: f64) -> Result<PointSet> {
        PointSet::new(
            self.n,
            self.points.iter().map(|p| p.iter().map(|v| v * c).collect()).collect(),
        )
    }

    /// Order-independent content hash of the coordinates' bit patterns.
    pub fn content_hash(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.n.hash(&mut h);
        for p in &self.points {
            for v in p {
                v.to_bits().hash(&mut h);
            }
        }
        h.finish()
    }
}

#[derive(Serialize, Deserialize)]
struct PointSetJson {
    n: usize,
    points: Vec<Vec<f64>>,
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PointSetJson {
            n: self.n,
            points: self.points.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = PointSetJson::deserialize(deserializer)?;
        PointSet::new(raw.n, raw.points).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn min_separation_examples() {
        let t = generate_triangle(0.1).unwrap();
        assert!((t.min_separation().unwrap() - 0.26f64.sqrt()).abs() < 1e-15);
        let g = generate_grid(1, 0.25).unwrap();
        assert!((g.min_separation().unwrap() - 0.25).abs() < 1e-15);
        let two = PointSet::new(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        assert_eq!(two.min_separation().unwrap(), 2.0);
        let one = PointSet::new(2, vec![vec![0.0, 0.0]]).unwrap();
        assert!(matches!(one.min_separation(), Err(Error::SeparationUndefined(1))));
        let none = PointSet::new(2, vec![]).unwrap();
        assert!(none.min_separation().is_err());
    }

    #[test]
    fn rejects_invalid_sets() {
        assert!(matches!(
            PointSet::new(2, vec![vec![0.9, 0.9]]),
            Err(Error::OutsideBall { index: 0, .. })
        ));
        assert!(matches!(
            PointSet::new(1, vec![vec![0.5], vec![0.5]]),
            Err(Error::DuplicatePoint { first: 0, second: 1 })
        ));
        assert!(PointSet::new(2, vec![vec![0.5]]).is_err());
    }

    #[test]
    fn json_validates_on_read() {
        let ok: PointSet = serde_json::from_str(r#"{"n":1,"points":[[0.5],[-0.25]]}"#).unwrap();
        assert_eq!(ok.len(), 2);
        assert!(serde_json::from_str::<PointSet>(r#"{"n":1,"points":[[2.0]]}"#).is_err());
    }
}
