//! Caratheodory-Tchakaloff compression of discrete measures.
//!
//! For a measure `Σ λ_i δ_{x_i}` on S² and a degree `ν`, the moment system
//! `Vᵀ u = Vᵀ λ, u ≥ 0` is solved by NNLS. The support of `u` is a subset of
//! at most `(ν+1)²` points whose positive weights reproduce every moment of
//! degree ≤ ν.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nnls::{nnls, NnlsOptions, NnlsSolution};
use crate::sh_basis::{dimension, vandermonde, VandermondeMatrix};
use crate::sphere::{PointConfiguration, PolynomialMesh};

/// Positive weights on a finite point set.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    support: PointConfiguration,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(support: PointConfiguration, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != support.len() {
            return Err(Error::DimensionMismatch { expected: support.len(), got: weights.len() });
        }
        if let Some(bad) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument(format!("measure weights must be positive, got {bad}")));
        }
        Ok(Self { support, weights })
    }

    /// Unit mass at every point.
    pub fn counting(support: PointConfiguration) -> Self {
        let weights = vec![1.0; support.len()];
        Self { support, weights }
    }

    pub fn support(&self) -> &PointConfiguration {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// `b = Vᵀ λ`, the moments of the basis against the measure.
pub fn moments(v: &VandermondeMatrix, lambda: &[f64]) -> Result<Vec<f64>> {
    if lambda.len() != v.rows() {
        return Err(Error::DimensionMismatch { expected: v.rows(), got: lambda.len() });
    }
    Ok(v.tr_mul_vec(lambda))
}

/// How the sparse nonnegative moment solution is found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[non_exhaustive]
pub enum CompressionStrategy {
    /// Lawson-Hanson NNLS on the moment system.
    #[default]
    Nnls,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CatchOptions {
    pub strategy: CompressionStrategy,
    pub nnls: NnlsOptions,
}

impl CatchOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { nnls: NnlsOptions { tol, ..Default::default() }, ..Default::default() }
    }
}

/// Support points and positive weights of a compressed measure.
#[derive(Debug, Clone)]
pub struct CatchSubmesh {
    pub points: PointConfiguration,
    pub weights: Vec<f64>,
    /// Position of each support point in the parent configuration.
    pub parent_indices: Vec<usize>,
    pub exactness_degree: usize,
    pub parent_cardinality: usize,
    /// `‖Vᵀ u − b‖₂`.
    pub moment_residual: f64,
    /// `‖b‖₂`, for relative residuals.
    pub moment_norm: f64,
    pub parent_mass: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightStats {
    pub min: f64,
    pub max: f64,
    pub avg: f64,
}

/// Summary written next to an extracted submesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatchReport {
    pub degree: usize,
    pub parent_cardinality: usize,
    pub catch_cardinality: usize,
    pub compression_ratio: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub w_avg: f64,
    pub moment_residual: f64,
    pub iterations: usize,
}

impl CatchSubmesh {
    /// The parent measure itself, uncompressed: every point with its weight.
    pub fn identity(measure: &DiscreteMeasure, exactness_degree: usize) -> Self {
        let m = measure.support.len();
        Self {
            points: measure.support.clone(),
            weights: measure.weights.clone(),
            parent_indices: (0..m).collect(),
            exactness_degree,
            parent_cardinality: m,
            moment_residual: 0.0,
            moment_norm: 0.0,
            parent_mass: measure.total_mass(),
            iterations: 0,
        }
    }

    pub fn cardinality(&self) -> usize {
        self.points.len()
    }

    pub fn compression_ratio(&self) -> f64 {
        self.parent_cardinality as f64 / self.cardinality() as f64
    }

    pub fn relative_moment_residual(&self) -> f64 {
        if self.moment_norm > 0.0 {
            self.moment_residual / self.moment_norm
        } else {
            self.moment_residual
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn weight_stats(&self) -> WeightStats {
        let min = self.weights.iter().copied().fold(f64::INFINITY, f64::min);
        let max = self.weights.iter().copied().fold(0.0, f64::max);
        WeightStats { min, max, avg: self.total_weight() / self.cardinality() as f64 }
    }

    pub fn report(&self) -> CatchReport {
        let stats = self.weight_stats();
        CatchReport {
            degree: self.exactness_degree / 2,
            parent_cardinality: self.parent_cardinality,
            catch_cardinality: self.cardinality(),
            compression_ratio: self.compression_ratio(),
            w_min: stats.min,
            w_max: stats.max,
            w_avg: stats.avg,
            moment_residual: self.moment_residual,
            iterations: self.iterations,
        }
    }

    /// Row order for output: weight descending, then parent order.
    pub fn output_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.cardinality()).collect();
        order.sort_by(|&a, &b| {
            self.weights[b].total_cmp(&self.weights[a]).then(self.parent_indices[a].cmp(&self.parent_indices[b]))
        });
        order
    }
}

/// Compresses `measure` against the columns of `basis_t` (N×M, one column per
/// support point), which may be any basis of the target polynomial space.
pub fn compress_with_basis(
    measure: &DiscreteMeasure,
    basis_t: &DMatrix<f64>,
    exactness_degree: usize,
    opts: &CatchOptions,
) -> Result<CatchSubmesh> {
    let (n, m) = basis_t.shape();
    if m != measure.support.len() {
        return Err(Error::DimensionMismatch { expected: measure.support.len(), got: m });
    }
    if m <= n {
        return Err(Error::NoCompression { cardinality: m, dimension: n });
    }
    let b = (basis_t * nalgebra::DVector::from_column_slice(&measure.weights)).as_slice().to_vec();
    let solution = match opts.strategy {
        CompressionStrategy::Nnls => nnls(basis_t, &b, &opts.nnls)?,
    };
    Ok(assemble(measure, &solution, &b, exactness_degree))
}

fn assemble(measure: &DiscreteMeasure, solution: &NnlsSolution, b: &[f64], exactness_degree: usize) -> CatchSubmesh {
    let indices = solution.passive_set.clone();
    let weights = indices.iter().map(|&j| solution.u[j]).collect();
    let label = format!("catch{}({})", exactness_degree, measure.support.label());
    CatchSubmesh {
        points: measure.support.select(&indices, label),
        weights,
        parent_indices: indices,
        exactness_degree,
        parent_cardinality: measure.support.len(),
        moment_residual: solution.residual_norm,
        moment_norm: b.iter().map(|v| v * v).sum::<f64>().sqrt(),
        parent_mass: measure.total_mass(),
        iterations: solution.iterations,
    }
}

/// CATCH submesh of `measure` exact for spherical polynomials of degree `exactness_degree`.
pub fn compress_measure(
    measure: &DiscreteMeasure,
    exactness_degree: usize,
    opts: &CatchOptions,
) -> Result<CatchSubmesh> {
    let dim = dimension(exactness_degree);
    if measure.support.len() <= dim {
        return Err(Error::NoCompression { cardinality: measure.support.len(), dimension: dim });
    }
    let v = vandermonde(&measure.support, exactness_degree)?;
    compress_with_basis(measure, &v.transpose_matrix(), exactness_degree, opts)
}

/// Extracts the degree-`2n` CATCH submesh of a degree-`n` polynomial mesh
/// carrying unit weights.
pub fn extract_catch_submesh(mesh: &PolynomialMesh, opts: &CatchOptions) -> Result<CatchSubmesh> {
    compress_measure(&DiscreteMeasure::counting(mesh.config.clone()), 2 * mesh.degree, opts)
}

/// Largest relative errors seen by [`exactness_errors`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactnessReport {
    /// `|Σ λ_i p(x_i) − Σ w_j p(t_j)| / Σ λ_i |p(x_i)|` over random `p` of degree `2n`.
    pub quadrature: f64,
    /// `|‖p‖²_{ℓ²_λ(X)} − ‖p‖²_{ℓ²_w(T)}| / ‖p‖²_{ℓ²_λ(X)}` over random `p` of degree `n`.
    pub l2_identity: f64,
}

impl ExactnessReport {
    pub fn max(&self) -> f64 {
        self.quadrature.max(self.l2_identity)
    }
}

/// Compares the parent measure and the submesh on `quadrature_trials` random
/// polynomials of degree `exactness_degree` and `l2_trials` random squares of
/// degree `exactness_degree / 2`. Coefficients are uniform in [-1, 1].
pub fn exactness_errors(
    measure: &DiscreteMeasure,
    sub: &CatchSubmesh,
    quadrature_trials: usize,
    l2_trials: usize,
    seed: u64,
) -> Result<ExactnessReport> {
    if sub.parent_cardinality != measure.support.len() {
        return Err(Error::DimensionMismatch { expected: measure.support.len(), got: sub.parent_cardinality });
    }
    let degree = sub.exactness_degree;
    let v = vandermonde(&measure.support, degree)?;
    let half = v.truncate(degree / 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambda = &measure.weights;

    let mut quadrature = 0.0_f64;
    for _ in 0..quadrature_trials {
        let c: Vec<f64> = (0..v.cols()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let values = v.mul_vec(&c);
        let full: f64 = values.iter().zip(lambda).map(|(p, l)| l * p).sum();
        let scale: f64 = values.iter().zip(lambda).map(|(p, l)| l * p.abs()).sum();
        let compressed: f64 = sub.parent_indices.iter().zip(&sub.weights).map(|(&i, w)| w * values[i]).sum();
        quadrature = quadrature.max((full - compressed).abs() / scale);
    }

    let mut l2_identity = 0.0_f64;
    for _ in 0..l2_trials {
        let c: Vec<f64> = (0..half.cols()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let values = half.mul_vec(&c);
        let full: f64 = values.iter().zip(lambda).map(|(p, l)| l * p * p).sum();
        let compressed: f64 =
            sub.parent_indices.iter().zip(&sub.weights).map(|(&i, w)| w * values[i] * values[i]).sum();
        l2_identity = l2_identity.max((full - compressed).abs() / full);
    }
    Ok(ExactnessReport { quadrature, l2_identity })
}

/// Maximum relative discrepancy of the submesh against its unit-weight parent
/// mesh over `trials` random polynomials (both quadrature and ℓ²-identity checks).
pub fn verify_exactness(mesh: &PolynomialMesh, sub: &CatchSubmesh, trials: usize, seed: u64) -> Result<f64> {
    let measure = DiscreteMeasure::counting(mesh.config.clone());
    Ok(exactness_errors(&measure, sub, trials, trials, seed)?.max())
}
