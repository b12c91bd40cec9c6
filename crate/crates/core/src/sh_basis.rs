//! Real spherical harmonics of total degree ≤ n and Vandermonde assembly.
//!
//! Convention: `Y_{l,0} = K_{l,0} P_l(cos θ)`,
//! `Y_{l,m} = √2 K_{l,m} P_l^m(cos θ) cos(mφ)` and
//! `Y_{l,-m} = √2 K_{l,m} P_l^m(cos θ) sin(mφ)` for `m > 0`, without the
//! Condon-Shortley phase and with unit L²(S²) norm. Basis function `(l, m)`
//! sits at linear index `l² + l + m`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{PointConfiguration, SpherePoint};

/// Largest `|‖p‖ - 1|` accepted by [`eval_basis`].
pub const BASIS_UNIT_TOLERANCE: f64 = 1e-8;

/// Dimension of the space of spherical polynomials of degree ≤ n.
pub const fn dimension(n: usize) -> usize {
    (n + 1) * (n + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisIndex {
    pub l: usize,
    pub m: i64,
}

impl BasisIndex {
    pub fn new(l: usize, m: i64) -> Result<Self> {
        if m.unsigned_abs() as usize > l {
            return Err(Error::InvalidArgument(format!("|m| = {} exceeds l = {l}", m.abs())));
        }
        Ok(Self { l, m })
    }

    pub fn linear(&self) -> usize {
        ((self.l * self.l + self.l) as i64 + self.m) as usize
    }

    pub fn from_linear(k: usize) -> Self {
        let l = (k as f64).sqrt() as usize;
        // Correct a possible off-by-one from the float square root.
        let l = if (l + 1) * (l + 1) <= k {
            l + 1
        } else if l * l > k {
            l - 1
        } else {
            l
        };
        Self { l, m: k as i64 - (l * l + l) as i64 }
    }
}

/// Fully normalized associated Legendre values `√((2l+1)/(4π) (l-m)!/(l+m)!) P_l^m(x)`,
/// stored at `l(l+1)/2 + m` for `0 ≤ m ≤ l ≤ n`.
fn normalized_legendre(n: usize, x: f64, sin_theta: f64, out: &mut [f64]) {
    let tri = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let mut sectoral = 0.5 / PI.sqrt();
    for m in 0..=n {
        if m > 0 {
            sectoral *= ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * sin_theta;
        }
        out[tri(m, m)] = sectoral;
        if m == n {
            break;
        }
        let mut prev2 = sectoral;
        let mut prev1 = ((2 * m + 3) as f64).sqrt() * x * sectoral;
        out[tri(m + 1, m)] = prev1;
        for l in m + 2..=n {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            let next = a * (x * prev1 - b * prev2);
            out[tri(l, m)] = next;
            prev2 = prev1;
            prev1 = next;
        }
    }
}

/// Writes all `(n+1)²` real harmonics at `p` into `out`.
pub fn eval_basis_into(p: &SpherePoint, n: usize, out: &mut [f64]) -> Result<()> {
    let deviation = p.norm() - 1.0;
    if !deviation.is_finite() || deviation.abs() > BASIS_UNIT_TOLERANCE {
        return Err(Error::NotUnit { index: 0, deviation });
    }
    if out.len() != dimension(n) {
        return Err(Error::DimensionMismatch { expected: dimension(n), got: out.len() });
    }
    let rho = p.x.hypot(p.y);
    let (cos_phi, sin_phi) = if rho > 0.0 { (p.x / rho, p.y / rho) } else { (1.0, 0.0) };
    let mut legendre = vec![0.0; (n + 1) * (n + 2) / 2];
    normalized_legendre(n, p.z, rho, &mut legendre);

    let (mut cm, mut sm) = (1.0, 0.0);
    for m in 0..=n {
        if m > 0 {
            (cm, sm) = (cm * cos_phi - sm * sin_phi, sm * cos_phi + cm * sin_phi);
        }
        for l in m..=n {
            let value = legendre[l * (l + 1) / 2 + m];
            let center = l * l + l;
            if m == 0 {
                out[center] = value;
            } else {
                let scaled = std::f64::consts::SQRT_2 * value;
                out[center + m] = scaled * cm;
                out[center - m] = scaled * sm;
            }
        }
    }
    Ok(())
}

/// Real orthonormal spherical harmonics of degree ≤ n at `p`.
pub fn eval_basis(p: &SpherePoint, n: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; dimension(n)];
    eval_basis_into(p, n, &mut out)?;
    Ok(out)
}

/// `V[i][j] = Y_j(x_i)`, stored row-major with the basis index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct VandermondeMatrix {
    entries: Vec<f64>,
    rows: usize,
    degree: usize,
    config_label: String,
}

impl VandermondeMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        dimension(self.degree)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn config_label(&self) -> &str {
        &self.config_label
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.cols();
        &self.entries[i * n..(i + 1) * n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    /// `V` as an M×N nalgebra matrix.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols(), &self.entries)
    }

    /// `Vᵀ` (N×M): the row-major layout of `V` is the column-major layout of `Vᵀ`.
    pub fn transpose_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.cols(), self.rows, &self.entries)
    }

    /// Keeps only the first `dimension(n)` columns, i.e. degree ≤ n.
    pub fn truncate(&self, n: usize) -> VandermondeMatrix {
        assert!(n <= self.degree);
        let (cols, keep) = (self.cols(), dimension(n));
        let entries = self.entries.chunks_exact(cols).flat_map(|row| &row[..keep]).copied().collect();
        VandermondeMatrix { entries, rows: self.rows, degree: n, config_label: self.config_label.clone() }
    }

    /// `V c` for a coefficient vector of length `cols()`.
    pub fn mul_vec(&self, c: &[f64]) -> Vec<f64> {
        assert_eq!(c.len(), self.cols());
        self.entries.par_chunks_exact(self.cols()).map(|row| row.iter().zip(c).map(|(a, b)| a * b).sum()).collect()
    }

    /// `Vᵀ u` for a vector of length `rows()`.
    pub fn tr_mul_vec(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.rows);
        let mut out = vec![0.0; self.cols()];
        for (row, &ui) in self.entries.chunks_exact(self.cols()).zip(u) {
            for (o, &v) in out.iter_mut().zip(row) {
                *o += ui * v;
            }
        }
        out
    }
}

/// Basis evaluations at every point of `config`.
pub fn vandermonde(config: &PointConfiguration, n: usize) -> Result<VandermondeMatrix> {
    let cols = dimension(n);
    let mut entries = vec![0.0; config.len() * cols];
    entries.par_chunks_exact_mut(cols).zip(config.points().par_iter()).enumerate().try_for_each(|(i, (row, p))| {
        eval_basis_into(p, n, row).map_err(|e| match e {
            Error::NotUnit { deviation, .. } => Error::NotUnit { index: i, deviation },
            other => other,
        })
    })?;
    Ok(VandermondeMatrix { entries, rows: config.len(), degree: n, config_label: config.label().to_string() })
}

/// Numerical rank from the diagonal of a column-pivoted QR factorization.
pub fn numerical_rank(v: &VandermondeMatrix, rel_tol: f64) -> usize {
    let qr = v.to_matrix().col_piv_qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..r.nrows().min(r.ncols())).map(|i| r[(i, i)].abs()).collect();
    let max = diag.iter().copied().fold(0.0, f64::max);
    diag.iter().filter(|&&d| d > rel_tol * max).count()
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    let kf = k as f64;
    for i in 0..k.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (kf + 0.5)).cos();
        let mut derivative = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=k {
                let jf = j as f64;
                (p0, p1) = (p1, ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf);
            }
            let pk = if k == 0 { 1.0 } else { p1 };
            let pk1 = if k <= 1 { 1.0 } else { p0 };
            derivative = kf * (x * pk - pk1) / (x * x - 1.0);
            let dx = pk / derivative;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[k - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    (nodes, weights)
}

/// Product rule on S² (Gauss-Legendre in `cos θ` times trapezoid in `φ`),
/// `(n+1) × (2n+2)` nodes, exact for spherical polynomials of degree ≤ 2n+1.
pub fn reference_quadrature(n: usize) -> (Vec<SpherePoint>, Vec<f64>) {
    let (zs, wz) = gauss_legendre(n + 1);
    let n_phi = 2 * n + 2;
    let wphi = 2.0 * PI / n_phi as f64;
    let mut points = Vec::with_capacity(zs.len() * n_phi);
    let mut weights = Vec::with_capacity(zs.len() * n_phi);
    for (&z, &w) in zs.iter().zip(&wz) {
        let rho = (1.0 - z * z).sqrt();
        for j in 0..n_phi {
            let (s, c) = (2.0 * PI * j as f64 / n_phi as f64).sin_cos();
            points.push(SpherePoint { x: rho * c, y: rho * s, z });
            weights.push(w * wphi);
        }
    }
    (points, weights)
}
