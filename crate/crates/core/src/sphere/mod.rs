//! Geometry on the unit sphere S².
//!
//! Points, finite configurations, zonal equal-area point sets, covering
//! radii and the cardinality rules that turn a good covering into an
//! optimal polynomial mesh.

mod covering;
mod mesh;
mod partition;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use covering::{covering_radius, dubiner_covering_radius, verify_dubiner_covering, CoveringRadius, NearestIndex};
pub use mesh::{build_optimal_mesh, mesh_cardinality, CardinalityVariant, MeshCardinalityPolicy, PolynomialMesh};
pub use partition::{zonal_equal_area_points, EqPartition};

/// Tolerance on `|p| - 1` accepted when points come from outside (files, users).
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Euclidean distance under which two points count as the same point.
pub const SEPARATION_TOLERANCE: f64 = 1e-12;

/// A point of R³, meant to lie on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpherePoint {
    /// Projects `(x, y, z)` radially onto the sphere. Panics on the zero vector.
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        let r = (x * x + y * y + z * z).sqrt();
        assert!(r > 0.0 && r.is_finite(), "cannot normalize {x}, {y}, {z}");
        Self { x: x / r, y: y / r, z: z / r }
    }

    /// Point with colatitude `theta` and longitude `phi`.
    pub fn from_polar(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self { x: st * cp, y: st * sp, z: ct }
    }

    pub const fn north() -> Self {
        Self { x: 0.0, y: 0.0, z: 1.0 }
    }

    pub const fn south() -> Self {
        Self { x: 0.0, y: 0.0, z: -1.0 }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn chord(&self, other: &SpherePoint) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Geodesic (great-circle) distance, which is also the Dubiner distance on S².
pub fn geodesic_distance(a: &SpherePoint, b: &SpherePoint) -> f64 {
    a.dot(b).clamp(-1.0, 1.0).acos()
}

/// Geodesic length of a chord of Euclidean length `chord`.
pub fn chord_to_geodesic(chord: f64) -> f64 {
    2.0 * (0.5 * chord).clamp(-1.0, 1.0).asin()
}

/// A nonempty ordered set of distinct unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration {
    points: Vec<SpherePoint>,
    label: String,
}

impl PointConfiguration {
    /// Validates unit norm and pairwise separation.
    pub fn new(points: Vec<SpherePoint>, label: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("point configuration is empty".into()));
        }
        for (index, p) in points.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                return Err(Error::NonFinite);
            }
            let deviation = p.norm() - 1.0;
            if deviation.abs() > UNIT_TOLERANCE {
                return Err(Error::NotUnit { index, deviation });
            }
        }
        if let Some((first, second)) = find_coincident(&points, SEPARATION_TOLERANCE) {
            return Err(Error::DuplicatePoint { first, second });
        }
        Ok(Self { points, label: label.into() })
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn new_unchecked(points: Vec<SpherePoint>, label: impl Into<String>) -> Self {
        debug_assert!(!points.is_empty());
        Self { points, label: label.into() }
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn into_points(self) -> Vec<SpherePoint> {
        self.points
    }

    /// Sub-configuration made of the given indices, in the given order.
    pub fn select(&self, indices: &[usize], label: impl Into<String>) -> Self {
        let points = indices.iter().map(|&i| self.points[i]).collect();
        Self::new_unchecked(points, label)
    }
}

/// First pair of points closer than `tol`, found by hashing into cells of width `CELL`.
fn find_coincident(points: &[SpherePoint], tol: f64) -> Option<(usize, usize)> {
    const CELL: f64 = 1e-6;
    let key = |v: f64| (v / CELL).floor() as i64;
    let mut cells: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let (cx, cy, cz) = (key(p.x), key(p.y), key(p.z));
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(bucket) = cells.get(&(cx + dx, cy + dy, cz + dz)) {
                        if let Some(&j) = bucket.iter().find(|&&j| points[j].chord(p) <= tol) {
                            return Some((j, i));
                        }
                    }
                }
            }
        }
        cells.entry((cx, cy, cz)).or_default().push(i);
    }
    None
}
