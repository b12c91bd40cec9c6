//! Optimal polynomial meshes of the square `[-1, 1]²` from Padua points.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed outside `[-1, 1]` for coordinates.
pub const SQUARE_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquarePoint {
    pub u: f64,
    pub v: f64,
}

impl SquarePoint {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        let inside = |t: f64| t.is_finite() && t.abs() <= 1.0 + SQUARE_TOLERANCE;
        if !(inside(u) && inside(v)) {
            return Err(Error::InvalidArgument(format!("({u}, {v}) lies outside [-1, 1]²")));
        }
        Ok(Self { u, v })
    }

    /// Point with coordinates `(cos a, cos b)`.
    pub fn from_angles(a: f64, b: f64) -> Self {
        Self { u: a.cos(), v: b.cos() }
    }

    pub fn angles(&self) -> (f64, f64) {
        (self.u.clamp(-1.0, 1.0).acos(), self.v.clamp(-1.0, 1.0).acos())
    }
}

/// Dubiner distance of the square: the larger of the two coordinate-wise
/// arc-cosine distances.
pub fn dubiner_distance_square(a: &SquarePoint, b: &SquarePoint) -> f64 {
    let (a1, a2) = a.angles();
    let (b1, b2) = b.angles();
    (a1 - b1).abs().max((a2 - b2).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaduaSet {
    pub points: Vec<SquarePoint>,
    pub k: usize,
}

impl PaduaSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Number of Padua points of degree `k`.
pub const fn padua_cardinality(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// Padua points of degree `k`: the Chebyshev-Lobatto pairs
/// `(cos(jπ/k), cos(iπ/(k+1)))` with `j + i` odd.
pub fn padua_points(k: usize) -> Result<PaduaSet> {
    if k < 1 {
        return Err(Error::InvalidArgument("Padua degree must be at least 1".into()));
    }
    let mut points = Vec::with_capacity(padua_cardinality(k));
    for j in 0..=k {
        let a = j as f64 * PI / k as f64;
        // even j pairs with odd i and vice versa
        for i in (1 - j % 2..=k + 1).step_by(2) {
            let b = i as f64 * PI / (k + 1) as f64;
            points.push(SquarePoint::from_angles(a, b));
        }
    }
    debug_assert_eq!(points.len(), padua_cardinality(k));
    Ok(PaduaSet { points, k })
}

/// Padua degree `⌈πn/θ⌉` that covers the square within Dubiner radius `θ/n`.
pub fn padua_mesh_degree(n: usize, theta: f64) -> Result<usize> {
    if n < 1 {
        return Err(Error::InvalidArgument("mesh degree must be at least 1".into()));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidArgument(format!("theta must lie in (0, 1), got {theta}")));
    }
    Ok((PI * n as f64 / theta).ceil() as usize)
}

/// Optimal polynomial mesh of degree `n` on the square with constant `1/(1−θ)`.
pub fn padua_optimal_mesh(n: usize, theta: f64) -> Result<PaduaSet> {
    padua_points(padua_mesh_degree(n, theta)?)
}

/// `side × side` points `(cos a_i, cos b_j)` with equally spaced angles in `[0, π]`.
pub fn chebyshev_angle_grid(side: usize) -> Vec<SquarePoint> {
    assert!(side >= 2);
    let step = PI / (side - 1) as f64;
    (0..side).flat_map(|i| (0..side).map(move |j| SquarePoint::from_angles(i as f64 * step, j as f64 * step))).collect()
}

/// Largest Dubiner distance from a probe point to the nearest point of `set`.
pub fn square_covering_radius(set: &[SquarePoint], probe: &[SquarePoint]) -> f64 {
    let angles: Vec<(f64, f64)> = set.iter().map(SquarePoint::angles).collect();
    probe
        .par_iter()
        .map(|q| {
            let (a, b) = q.angles();
            angles.iter().map(|&(x, y)| (a - x).abs().max((b - y).abs())).fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

/// `Σ_{i+j≤n} c_{ij} T_i(u) T_j(v)` with coefficients ordered by `i`, then `j`.
pub fn total_degree_chebyshev(coeffs: &[f64], n: usize, p: &SquarePoint) -> f64 {
    assert_eq!(coeffs.len(), (n + 1) * (n + 2) / 2);
    let (a, b) = p.angles();
    let mut k = 0;
    let mut sum = 0.0;
    for i in 0..=n {
        let ti = (i as f64 * a).cos();
        for j in 0..=n - i {
            sum += coeffs[k] * ti * (j as f64 * b).cos();
            k += 1;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        let a = SquarePoint::new(0.3, -0.2).unwrap();
        assert_eq!(dubiner_distance_square(&a, &a), 0.0);
        let d = dubiner_distance_square(&SquarePoint::new(1.0, 0.0).unwrap(), &SquarePoint::new(-1.0, 0.0).unwrap());
        assert!((d - PI).abs() < 1e-15);
        let a = SquarePoint::from_angles(0.3, 0.7);
        let b = SquarePoint::from_angles(0.5, 0.6);
        assert!((dubiner_distance_square(&a, &b) - 0.2).abs() < 1e-14);
        assert!(SquarePoint::new(1.1, 0.0).is_err());
    }

    #[test]
    fn small_padua_sets() {
        let p1 = padua_points(1).unwrap();
        assert_eq!(p1.len(), 3);
        assert_eq!(padua_points(2).unwrap().len(), 6);
        assert!(padua_points(0).is_err());
        let u: Vec<_> = p1.points.iter().map(|p| (p.u.round(), p.v.round())).collect();
        assert_eq!(u, vec![(1.0, 0.0), (-1.0, 1.0), (-1.0, -1.0)]);
    }

    #[test]
    fn cardinality_and_distinctness() {
        for k in 1..=50 {
            let set = padua_points(k).unwrap();
            assert_eq!(set.len(), padua_cardinality(k));
            let mut keys: Vec<_> = set.points.iter().map(|p| (p.u.to_bits(), p.v.to_bits())).collect();
            keys.sort_unstable();
            keys.dedup();
            assert_eq!(keys.len(), set.len());
            assert!(set.points.iter().all(|p| p.u.abs() <= 1.0 && p.v.abs() <= 1.0));
        }
    }

    #[test]
    fn degree_four_covering() {
        let set = padua_points(4).unwrap();
        let radius = square_covering_radius(&set.points, &chebyshev_angle_grid(500));
        assert!(radius <= PI / 4.0 + 1e-12, "{radius}");
    }

    #[test]
    fn mesh_sizes() {
        assert_eq!(padua_optimal_mesh(5, 0.5).unwrap().len(), 561);
        assert_eq!(padua_optimal_mesh(1, 0.5).unwrap().len(), 36);
        let m = padua_optimal_mesh(3, 0.25).unwrap();
        assert_eq!((m.k, m.len()), (38, 780));
        assert!(padua_optimal_mesh(0, 0.5).is_err());
        assert!(padua_optimal_mesh(2, 1.0).is_err());
    }

    #[test]
    fn chebyshev_polynomial_evaluation() {
        // T_2(u) T_1(v) = (2u² − 1) v
        let n = 3;
        let mut c = vec![0.0; 10];
        // ordering: (0,0..3), (1,0..2), (2,0..1), (3,0)
        c[7 + 1] = 1.0;
        let p = SquarePoint::new(0.4, -0.3).unwrap();
        assert!((total_degree_chebyshev(&c, n, &p) - (2.0 * 0.16 - 1.0) * -0.3).abs() < 1e-14);
    }
}
