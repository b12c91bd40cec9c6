//! Discrete (weighted) least squares in the space of spherical polynomials of
//! degree ≤ n, with Lebesgue-function estimates of the projection's sup-norm.
//!
//! Everything goes through a Householder QR of `diag(√w) V`; normal
//! equations are never formed.

use nalgebra::{DMatrix, DVector, Dyn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sh_basis::{dimension, eval_basis_into, vandermonde};
use crate::sphere::{zonal_equal_area_points, PointConfiguration, SpherePoint};

/// Relative size of the smallest `|r_kk|` below which the system counts as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-11;

const CONTROL_BLOCK: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicCoefficients {
    pub coeffs: Vec<f64>,
    pub degree: usize,
}

impl HarmonicCoefficients {
    pub fn new(coeffs: Vec<f64>, degree: usize) -> Result<Self> {
        if coeffs.len() != dimension(degree) {
            return Err(Error::DimensionMismatch { expected: dimension(degree), got: coeffs.len() });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { coeffs, degree })
    }

    pub fn zeros(degree: usize) -> Self {
        Self { coeffs: vec![0.0; dimension(degree)], degree }
    }

    /// The single basis function at linear index `k`.
    pub fn unit(degree: usize, k: usize) -> Self {
        let mut c = Self::zeros(degree);
        c.coeffs[k] = 1.0;
        c
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.degree, other.degree);
        self.coeffs.iter().zip(&other.coeffs).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FitMethod {
    #[serde(rename = "full_mesh_LS")]
    FullMeshLs,
    #[serde(rename = "catch_weighted_LS")]
    CatchWeightedLs,
}

impl std::fmt::Display for FitMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FitMethod::FullMeshLs => "full_mesh_LS",
            FitMethod::CatchWeightedLs => "catch_weighted_LS",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub n: usize,
    pub method: FitMethod,
    pub sup_error: f64,
    pub operator_norm: f64,
    pub condition_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub catch_cardinality: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub compression_ratio: Option<f64>,
}

/// The weighted least-squares projection onto degree ≤ n for fixed nodes and weights.
pub struct LsProjector {
    degree: usize,
    sqrt_w: Vec<f64>,
    qr: nalgebra::linalg::QR<f64, Dyn, Dyn>,
    r: DMatrix<f64>,
}

impl LsProjector {
    pub fn new(points: &PointConfiguration, weights: &[f64], n: usize) -> Result<Self> {
        let (m, dim) = (points.len(), dimension(n));
        if weights.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: weights.len() });
        }
        if let Some(bad) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument(format!("least-squares weights must be positive, got {bad}")));
        }
        if m < dim {
            return Err(Error::RankDeficient { degree: n, ratio: 0.0 });
        }
        let sqrt_w: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
        let mut b = vandermonde(points, n)?.to_matrix();
        for (mut row, &s) in b.row_iter_mut().zip(&sqrt_w) {
            row *= s;
        }
        let qr = b.qr();
        let r = qr.r();
        let diag: Vec<f64> = (0..dim).map(|i| r[(i, i)].abs()).collect();
        let max = diag.iter().copied().fold(0.0, f64::max);
        let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
        let ratio = if max > 0.0 { min / max } else { 0.0 };
        if ratio.is_nan() || ratio <= RANK_TOLERANCE {
            return Err(Error::RankDeficient { degree: n, ratio });
        }
        Ok(Self { degree: n, sqrt_w, qr, r })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.sqrt_w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sqrt_w.is_empty()
    }

    /// Coefficients minimizing `Σ w_j (f_j − p(t_j))²`.
    pub fn fit(&self, samples: &[f64]) -> Result<HarmonicCoefficients> {
        if samples.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: samples.len() });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut rhs = DVector::from_iterator(samples.len(), samples.iter().zip(&self.sqrt_w).map(|(f, s)| f * s));
        self.qr.q_tr_mul(&mut rhs);
        let dim = dimension(self.degree);
        let c = self
            .r
            .solve_upper_triangular(&rhs.rows(0, dim).into_owned())
            .ok_or(Error::RankDeficient { degree: self.degree, ratio: 0.0 })?;
        HarmonicCoefficients::new(c.as_slice().to_vec(), self.degree)
    }

    /// Ratio of extreme singular values of `diag(√w) V`.
    pub fn condition_estimate(&self) -> f64 {
        let s = self.r.singular_values();
        let max = s.iter().copied().fold(0.0, f64::max);
        let min = s.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// `max_x Σ_j w_j |K(x, t_j)|` over `control`, where `K` is the reproducing
    /// kernel of the discrete inner product `Σ_j w_j p(t_j) q(t_j)`.
    ///
    /// With `diag(√w) V = Q R`, `√w_j K(x, t_j) = (Q R⁻ᵀ v(x))_j`.
    pub fn operator_norm(&self, control: &PointConfiguration) -> Result<f64> {
        let dim = dimension(self.degree);
        let q = self.qr.q();
        let r = &self.r;
        let sqrt_w = &self.sqrt_w;
        let n = self.degree;
        control
            .points()
            .par_chunks(CONTROL_BLOCK)
            .map(|chunk| -> Result<f64> {
                let mut vt = DMatrix::<f64>::zeros(dim, chunk.len());
                for (mut col, p) in vt.column_iter_mut().zip(chunk) {
                    eval_basis_into(p, n, col.as_mut_slice())?;
                }
                let g = r.tr_solve_upper_triangular(&vt).ok_or(Error::RankDeficient { degree: n, ratio: 0.0 })?;
                let kernel = &q * g;
                Ok(kernel
                    .column_iter()
                    .map(|col| col.iter().zip(sqrt_w).map(|(k, s)| (k * s).abs()).sum::<f64>())
                    .fold(0.0, f64::max))
            })
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    }
}

/// Weighted discrete least-squares fit of `samples` taken at `points`.
pub fn weighted_ls_fit(
    points: &PointConfiguration,
    weights: &[f64],
    n: usize,
    samples: &[f64],
) -> Result<HarmonicCoefficients> {
    LsProjector::new(points, weights, n)?.fit(samples)
}

/// Unweighted least squares on a mesh.
pub fn unweighted_ls_fit(points: &PointConfiguration, n: usize, samples: &[f64]) -> Result<HarmonicCoefficients> {
    weighted_ls_fit(points, &vec![1.0; points.len()], n, samples)
}

/// Values of the polynomial with coefficients `c` at `points`.
pub fn evaluate_poly(c: &HarmonicCoefficients, points: &PointConfiguration) -> Result<Vec<f64>> {
    let dim = dimension(c.degree);
    points
        .points()
        .par_iter()
        .map_init(
            || vec![0.0; dim],
            |buf, p| {
                eval_basis_into(p, c.degree, buf)?;
                Ok(buf.iter().zip(&c.coeffs).map(|(a, b)| a * b).sum())
            },
        )
        .collect()
}

/// Sup-norm of the weighted least-squares projection, estimated on `control`.
pub fn ls_operator_norm(
    points: &PointConfiguration,
    weights: &[f64],
    n: usize,
    control: &PointConfiguration,
) -> Result<f64> {
    LsProjector::new(points, weights, n)?.operator_norm(control)
}

/// Reference functions of increasing roughness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestFunction {
    /// `(x + y + z)^15`, a polynomial of degree 15.
    Polynomial,
    /// `exp(x + y + z) / 10`.
    Exponential,
    /// `(|x| + |y| + |z|) / 10`, not differentiable on the coordinate great circles.
    AbsoluteSum,
}

impl TestFunction {
    pub const ALL: [TestFunction; 3] = [TestFunction::Polynomial, TestFunction::Exponential, TestFunction::AbsoluteSum];

    pub fn from_id(id: u32) -> Result<Self> {
        match id {
            1 => Ok(TestFunction::Polynomial),
            2 => Ok(TestFunction::Exponential),
            3 => Ok(TestFunction::AbsoluteSum),
            other => Err(Error::UnknownFunction(other)),
        }
    }

    pub fn id(&self) -> u32 {
        match self {
            TestFunction::Polynomial => 1,
            TestFunction::Exponential => 2,
            TestFunction::AbsoluteSum => 3,
        }
    }

    pub fn eval(&self, p: &SpherePoint) -> f64 {
        match self {
            TestFunction::Polynomial => (p.x + p.y + p.z).powi(15),
            TestFunction::Exponential => (p.x + p.y + p.z).exp() / 10.0,
            TestFunction::AbsoluteSum => (p.x.abs() + p.y.abs() + p.z.abs()) / 10.0,
        }
    }

    pub fn sample(&self, points: &PointConfiguration) -> Vec<f64> {
        points.points().iter().map(|p| self.eval(p)).collect()
    }
}

pub fn test_function(id: u32, p: &SpherePoint) -> Result<f64> {
    Ok(TestFunction::from_id(id)?.eval(p))
}

/// `max_x |f(x) − p(x)|` over `control`.
pub fn sup_error<F>(c: &HarmonicCoefficients, f: F, control: &PointConfiguration) -> Result<f64>
where
    F: Fn(&SpherePoint) -> f64 + Sync,
{
    let values = evaluate_poly(c, control)?;
    Ok(control.points().iter().zip(&values).map(|(x, v)| (f(x) - v).abs()).fold(0.0, f64::max))
}

/// Control-grid size used when none is given: `max(100 (n+1)², 50 000)`.
pub fn default_control_size(n: usize) -> usize {
    (100 * dimension(n)).max(50_000)
}

/// Zonal equal-area control grid of the given size.
pub fn control_grid(size: usize) -> Result<PointConfiguration> {
    zonal_equal_area_points(size)
}
