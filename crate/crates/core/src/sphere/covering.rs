use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{chord_to_geodesic, PointConfiguration, SpherePoint};

/// Covering radius estimate of a configuration, measured on a probe set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveringRadius {
    pub euclidean: f64,
    pub geodesic: f64,
}

/// Uniform-grid bucket index for nearest-neighbour queries among points of S².
pub struct NearestIndex<'a> {
    points: &'a [SpherePoint],
    cell: f64,
    max_ring: i32,
    cells: HashMap<(i32, i32, i32), Vec<u32>>,
}

impl<'a> NearestIndex<'a> {
    pub fn new(points: &'a [SpherePoint]) -> Self {
        assert!(!points.is_empty(), "nearest-neighbour index over no points");
        let cell = (2.0 / (points.len() as f64).sqrt()).clamp(1e-4, 2.0);
        let mut index = Self {
            points,
            cell,
            max_ring: (2.0 / cell).ceil() as i32 + 2,
            cells: HashMap::with_capacity(points.len()),
        };
        for (i, p) in points.iter().enumerate() {
            let key = index.key(p);
            index.cells.entry(key).or_default().push(i as u32);
        }
        index
    }

    fn key(&self, p: &SpherePoint) -> (i32, i32, i32) {
        let k = |v: f64| (v / self.cell).floor() as i32;
        (k(p.x), k(p.y), k(p.z))
    }

    /// Index of the closest point and its Euclidean distance. Ties go to the
    /// lower index.
    pub fn nearest(&self, q: &SpherePoint) -> (usize, f64) {
        let (cx, cy, cz) = self.key(q);
        let mut best = (usize::MAX, f64::INFINITY);
        for ring in 0..=self.max_ring {
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    if dx.abs() == ring || dy.abs() == ring {
                        for dz in -ring..=ring {
                            self.scan((cx + dx, cy + dy, cz + dz), q, &mut best);
                        }
                    } else {
                        self.scan((cx + dx, cy + dy, cz - ring), q, &mut best);
                        if ring != 0 {
                            self.scan((cx + dx, cy + dy, cz + ring), q, &mut best);
                        }
                    }
                }
            }
            // Anything outside rings 0..=ring lies at least ring·cell away.
            if best.1 <= ring as f64 * self.cell {
                break;
            }
        }
        best
    }

    fn scan(&self, key: (i32, i32, i32), q: &SpherePoint, best: &mut (usize, f64)) {
        if let Some(bucket) = self.cells.get(&key) {
            for &j in bucket {
                let j = j as usize;
                let d = self.points[j].chord(q);
                if d < best.1 || (d == best.1 && j < best.0) {
                    *best = (j, d);
                }
            }
        }
    }
}

/// Largest distance from a probe point to its nearest configuration point.
///
/// This is a lower bound on the true covering radius that tightens as the
/// probe set is refined.
pub fn covering_radius(config: &PointConfiguration, probe: &PointConfiguration) -> CoveringRadius {
    let index = NearestIndex::new(config.points());
    let euclidean = probe.points().par_iter().map(|q| index.nearest(q).1).reduce(|| 0.0, f64::max);
    CoveringRadius { euclidean, geodesic: chord_to_geodesic(euclidean) }
}

/// Covering radius in the Dubiner metric, which on S² is the geodesic one.
pub fn dubiner_covering_radius(config: &PointConfiguration, probe: &PointConfiguration) -> f64 {
    covering_radius(config, probe).geodesic
}

/// Whether every probe point lies within geodesic distance `theta / n` of the
/// configuration, the condition that makes it a norming mesh for degree `n`
/// with constant `1 / (1 - theta)`.
pub fn verify_dubiner_covering(config: &PointConfiguration, n: usize, theta: f64, probe: &PointConfiguration) -> bool {
    if n == 0 || !(theta > 0.0 && theta < 1.0) {
        return false;
    }
    let radius = theta / n as f64;
    let index = NearestIndex::new(config.points());
    probe.points().par_iter().all(|q| chord_to_geodesic(index.nearest(q).1) <= radius)
}
