use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{verify_dubiner_covering, zonal_equal_area_points, PointConfiguration};
use crate::error::{Error, Result};

/// Which cardinality rule turns a degree into a mesh size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CardinalityVariant {
    /// `⌈σ_n² n²⌉` with `σ_n = 2πα / (θ(2π − θ/n))`, the sufficient bound
    /// derived from the covering estimate.
    #[serde(rename = "prop2")]
    Sufficient,
    /// `⌈49 (n − 1/(4π))²⌉`, the closed form behind the tabulated mesh sizes.
    #[default]
    #[serde(rename = "table1")]
    Tabulated,
}

impl fmt::Display for CardinalityVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CardinalityVariant::Sufficient => "prop2",
            CardinalityVariant::Tabulated => "table1",
        })
    }
}

impl FromStr for CardinalityVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prop2" | "proposition2" => Ok(CardinalityVariant::Sufficient),
            "table1" => Ok(CardinalityVariant::Tabulated),
            other => Err(Error::InvalidArgument(format!("unknown cardinality variant {other:?}"))),
        }
    }
}

/// Covering constant `alpha`, norming parameter `theta` and the size rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshCardinalityPolicy {
    pub alpha: f64,
    pub theta: f64,
    pub variant: CardinalityVariant,
}

impl Default for MeshCardinalityPolicy {
    fn default() -> Self {
        Self { alpha: 3.5, theta: 0.5, variant: CardinalityVariant::Tabulated }
    }
}

impl MeshCardinalityPolicy {
    pub fn new(alpha: f64, theta: f64, variant: CardinalityVariant) -> Result<Self> {
        let policy = Self { alpha, theta, variant };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidArgument(format!("theta must lie in (0, 1), got {}", self.theta)));
        }
        Ok(())
    }

    /// Norming constant `1 / (1 - theta)`.
    pub fn mesh_constant(&self) -> f64 {
        1.0 / (1.0 - self.theta)
    }
}

/// Number of good-covering points needed for an optimal mesh of degree `n`.
pub fn mesh_cardinality(n: usize, policy: &MeshCardinalityPolicy) -> Result<usize> {
    if n < 1 {
        return Err(Error::InvalidArgument("mesh degree must be at least 1".into()));
    }
    policy.validate()?;
    let nf = n as f64;
    let value = match policy.variant {
        CardinalityVariant::Sufficient => {
            let sigma = 2.0 * PI * policy.alpha / (policy.theta * (2.0 * PI - policy.theta / nf));
            sigma * sigma * nf * nf
        }
        CardinalityVariant::Tabulated => {
            let shifted = nf - 1.0 / (4.0 * PI);
            49.0 * shifted * shifted
        }
    };
    Ok(value.ceil() as usize)
}

/// A point configuration certified (or to be certified) as a norming set for
/// polynomials of degree `degree` with constant `mesh_constant`.
#[derive(Debug, Clone)]
pub struct PolynomialMesh {
    pub config: PointConfiguration,
    pub degree: usize,
    pub theta: f64,
    pub mesh_constant: f64,
}

impl PolynomialMesh {
    pub fn new(config: PointConfiguration, degree: usize, theta: f64) -> Result<Self> {
        if degree < 1 {
            return Err(Error::InvalidArgument("mesh degree must be at least 1".into()));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidArgument(format!("theta must lie in (0, 1), got {theta}")));
        }
        let needed = (degree + 1) * (degree + 1);
        if config.len() < needed {
            return Err(Error::InvalidArgument(format!(
                "{} points cannot be determining for degree {degree} (need at least {needed})",
                config.len()
            )));
        }
        Ok(Self { config, degree, theta, mesh_constant: 1.0 / (1.0 - theta) })
    }

    pub fn len(&self) -> usize {
        self.config.len()
    }

    pub fn is_empty(&self) -> bool {
        self.config.is_empty()
    }

    /// Checks the geodesic covering condition `θ/n` on `probe`.
    pub fn certify(&self, probe: &PointConfiguration) -> bool {
        verify_dubiner_covering(&self.config, self.degree, self.theta, probe)
    }
}

/// Zonal equal-area mesh of the size prescribed by `policy`.
pub fn build_optimal_mesh(n: usize, policy: &MeshCardinalityPolicy) -> Result<PolynomialMesh> {
    let m = mesh_cardinality(n, policy)?;
    let config = zonal_equal_area_points(m)?;
    PolynomialMesh::new(config, n, policy.theta)
}
