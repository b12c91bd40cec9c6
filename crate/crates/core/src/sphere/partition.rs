//! Zonal equal-area partitions of S² and their region centres.
//!
//! The sphere is cut into two polar caps, each one region, and a stack of
//! collars in between. Collar boundaries sit where the cumulative area is an
//! integer multiple of the region area, so every region of a collar split
//! evenly in longitude has area exactly `4π/M`.

use std::f64::consts::PI;

use super::{PointConfiguration, SpherePoint};
use crate::error::{Error, Result};

const SPHERE_AREA: f64 = 4.0 * PI;

fn cap_area(colatitude: f64) -> f64 {
    let s = (0.5 * colatitude).sin();
    SPHERE_AREA * s * s
}

fn cap_colatitude(area: f64) -> f64 {
    2.0 * (area / SPHERE_AREA).clamp(0.0, 1.0).sqrt().asin()
}

/// Zone layout of an equal-area partition: `boundaries[k]..boundaries[k + 1]`
/// is zone `k` in colatitude and holds `regions[k]` regions. Zone 0 and the
/// last zone are the polar caps.
#[derive(Debug, Clone, PartialEq)]
pub struct EqPartition {
    pub cardinality: usize,
    pub boundaries: Vec<f64>,
    pub regions: Vec<usize>,
}

impl EqPartition {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("equal-area partition needs at least 2 regions, got {m}")));
        }
        if m == 2 {
            return Ok(Self { cardinality: 2, boundaries: vec![0.0, 0.5 * PI, PI], regions: vec![1, 1] });
        }
        let mf = m as f64;
        let region_area = SPHERE_AREA / mf;
        let polar = cap_colatitude(region_area);
        let ideal_angle = region_area.sqrt();
        let n_collars = (((PI - 2.0 * polar) / ideal_angle).round() as usize).max(1);
        let fitting = (PI - 2.0 * polar) / n_collars as f64;

        let mut regions = Vec::with_capacity(n_collars + 2);
        regions.push(1);
        let mut discrepancy = 0.0;
        for i in 0..n_collars {
            let top = polar + i as f64 * fitting;
            let ideal = (cap_area(top + fitting) - cap_area(top)) / region_area;
            let count = (ideal + discrepancy).round();
            discrepancy += ideal - count;
            regions.push(count as usize);
        }
        regions.push(1);

        let total: usize = regions.iter().sum();
        if total != m {
            // Only reachable through a rounding tie in the last collar.
            let last = regions.len() - 2;
            regions[last] = (regions[last] + m)
                .checked_sub(total)
                .ok_or_else(|| Error::InvalidArgument(format!("inconsistent collar rounding for M = {m}")))?;
        }
        // Empty collars can appear for tiny M; they carry no points and no area.
        let mut boundaries = Vec::with_capacity(regions.len() + 1);
        boundaries.push(0.0);
        let mut cumulative = 0usize;
        for &count in &regions[..regions.len() - 1] {
            cumulative += count;
            boundaries.push(cap_colatitude(cumulative as f64 * region_area));
        }
        boundaries.push(PI);
        Ok(Self { cardinality: m, boundaries, regions })
    }

    pub fn zone_count(&self) -> usize {
        self.regions.len()
    }

    /// Surface area of every zone, caps included.
    pub fn zone_areas(&self) -> Vec<f64> {
        self.boundaries.windows(2).map(|w| cap_area(w[1]) - cap_area(w[0])).collect()
    }

    /// Region centres, north to south; collars are staggered by half of their
    /// own longitude spacing relative to the collar above.
    pub fn centers(&self) -> Vec<SpherePoint> {
        let mut points = Vec::with_capacity(self.cardinality);
        let last = self.regions.len() - 1;
        let mut offset = 0.0_f64;
        for (zone, &count) in self.regions.iter().enumerate() {
            if zone == 0 {
                points.push(SpherePoint::north());
                continue;
            }
            if zone == last {
                points.push(SpherePoint::south());
                continue;
            }
            if count == 0 {
                continue;
            }
            let colatitude = 0.5 * (self.boundaries[zone] + self.boundaries[zone + 1]);
            let spacing = 1.0 / count as f64;
            if zone > 1 {
                offset = (offset + 0.5 * spacing).fract();
            }
            for j in 0..count {
                let turn = ((j as f64 + 0.5) * spacing + offset).fract();
                points.push(SpherePoint::from_polar(colatitude, 2.0 * PI * turn));
            }
        }
        points
    }
}

/// Centres of the zonal equal-area partition of S² into `m` regions.
pub fn zonal_equal_area_points(m: usize) -> Result<PointConfiguration> {
    let partition = EqPartition::new(m)?;
    Ok(PointConfiguration::new_unchecked(partition.centers(), format!("eq{m}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_are_the_poles() {
        let cfg = zonal_equal_area_points(2).unwrap();
        assert_eq!(cfg.points(), &[SpherePoint::north(), SpherePoint::south()]);
    }

    #[test]
    fn rejects_fewer_than_two() {
        assert!(zonal_equal_area_points(0).is_err());
        assert!(zonal_equal_area_points(1).is_err());
    }

    #[test]
    fn exact_cardinality_and_unit_norm() {
        for m in (2..300).chain([1187, 3074, 9496, 19445]) {
            let cfg = zonal_equal_area_points(m).unwrap();
            assert_eq!(cfg.len(), m, "M = {m}");
            for p in cfg.points() {
                assert!((p.norm() - 1.0).abs() < 1e-12);
            }
            // Full validation including separation.
            PointConfiguration::new(cfg.into_points(), "check").unwrap();
        }
    }

    #[test]
    fn area_bookkeeping() {
        for m in [3, 7, 50, 181, 1187, 100_000] {
            let part = EqPartition::new(m).unwrap();
            let areas = part.zone_areas();
            let total: f64 = areas.iter().sum();
            assert!((total - SPHERE_AREA).abs() < 1e-10, "M = {m}: {total}");
            let region = SPHERE_AREA / m as f64;
            for (area, &count) in areas.iter().zip(&part.regions) {
                assert!((area - count as f64 * region).abs() < 1e-10, "M = {m}");
            }
            assert_eq!(part.regions.iter().sum::<usize>(), m);
        }
    }

    #[test]
    fn cumulative_rounding_stays_balanced() {
        for m in [181, 1187, 5844] {
            let part = EqPartition::new(m).unwrap();
            let region = SPHERE_AREA / m as f64;
            let polar = part.boundaries[1];
            let n_collars = part.zone_count() - 2;
            let fitting = (PI - 2.0 * polar) / n_collars as f64;
            let mut ideal_sum = 0.0;
            let mut actual_sum = 0.0;
            for i in 0..n_collars {
                let top = polar + i as f64 * fitting;
                ideal_sum += (cap_area(top + fitting) - cap_area(top)) / region;
                actual_sum += part.regions[i + 1] as f64;
                let d = ideal_sum - actual_sum;
                assert!(d > -0.5 - 1e-9 && d <= 0.5 + 1e-9);
            }
        }
    }
}
