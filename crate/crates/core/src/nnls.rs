//! Lawson-Hanson active-set solver for `min ‖A u − b‖₂` subject to `u ≥ 0`.
//!
//! The least-squares problem restricted to the passive columns is kept in a
//! QR factorization `A_P = Q R` that is updated in place: appending a column
//! costs one Householder reflection, dropping one costs a sweep of Givens
//! rotations. With `N` rows the work per iteration is `O(N²)` for the
//! factorization plus `O(N·M)` for the dual vector.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NnlsOptions {
    /// Stop once `max_j (Aᵀ(b − Au))_j ≤ tol · ‖Aᵀb‖_∞`.
    pub tol: f64,
    /// Cap on outer iterations; `None` means `10 · N`.
    pub max_iterations: Option<usize>,
}

impl Default for NnlsOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iterations: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnlsSolution {
    pub u: Vec<f64>,
    pub residual_norm: f64,
    /// Columns with positive weight, ascending.
    pub passive_set: Vec<usize>,
    pub iterations: usize,
}

impl NnlsSolution {
    /// Largest scaled violation of the KKT conditions: negative entries of
    /// `u`, positive dual components on the zero set and nonzero dual
    /// components on the support, with the dual scaled by `‖Aᵀb‖_∞`.
    pub fn kkt_violation(&self, a: &DMatrix<f64>, b: &[f64]) -> f64 {
        let residual = residual(a, b, &self.u);
        let scale = dual(a, b, |_| true).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let scale = if scale > 0.0 { scale } else { 1.0 };
        let w = dual(a, &residual, |_| true);
        let mut violation = 0.0_f64;
        for (j, (&uj, &wj)) in self.u.iter().zip(&w).enumerate() {
            violation = violation.max(-uj);
            let wj = wj / scale;
            if uj > 0.0 {
                violation = violation.max(wj.abs());
            } else {
                violation = violation.max(wj);
            }
            debug_assert!(uj > 0.0 || !self.passive_set.contains(&j));
        }
        violation
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ac, at) = a.split_at(a.len() / 4 * 4);
    let (bc, bt) = b.split_at(ac.len());
    for (x, y) in ac.chunks_exact(4).zip(bc.chunks_exact(4)) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    let tail: f64 = at.iter().zip(bt).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn column(a: &DMatrix<f64>, j: usize) -> &[f64] {
    let n = a.nrows();
    &a.as_slice()[j * n..(j + 1) * n]
}

/// `(Aᵀ r)_j` for columns selected by `keep`, zero elsewhere.
fn dual(a: &DMatrix<f64>, r: &[f64], keep: impl Fn(usize) -> bool + Sync) -> Vec<f64> {
    (0..a.ncols()).into_par_iter().with_min_len(256).map(|j| if keep(j) { dot(column(a, j), r) } else { 0.0 }).collect()
}

fn residual(a: &DMatrix<f64>, b: &[f64], u: &[f64]) -> Vec<f64> {
    let mut r = b.to_vec();
    for (j, &uj) in u.iter().enumerate() {
        if uj != 0.0 {
            for (ri, &aij) in r.iter_mut().zip(column(a, j)) {
                *ri -= uj * aij;
            }
        }
    }
    r
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// QR factorization of a growing and shrinking set of columns of an N-row
/// matrix, with `Q` kept explicitly (N×N) and `Qᵀb` maintained alongside.
struct UpdatedQr {
    n: usize,
    q: Vec<f64>,
    r: Vec<f64>,
    qtb: Vec<f64>,
    cols: Vec<usize>,
}

impl UpdatedQr {
    fn new(n: usize, b: &[f64]) -> Self {
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            q[i * n + i] = 1.0;
        }
        Self { n, q, r: vec![0.0; n * n], qtb: b.to_vec(), cols: Vec::with_capacity(n) }
    }

    fn k(&self) -> usize {
        self.cols.len()
    }

    fn qcol(&self, c: usize) -> &[f64] {
        &self.q[c * self.n..(c + 1) * self.n]
    }

    /// Appends column `index` with entries `a`. Refuses (returns `false`) when
    /// `a` is numerically in the span of the current columns.
    fn push(&mut self, index: usize, a: &[f64]) -> bool {
        let (n, k) = (self.n, self.k());
        if k == n {
            return false;
        }
        let y: Vec<f64> = (0..n).map(|c| dot(self.qcol(c), a)).collect();
        let sigma = norm(&y[k..]);
        if sigma <= 1e3 * f64::EPSILON * norm(a) {
            return false;
        }
        let alpha = if y[k] >= 0.0 { -sigma } else { sigma };
        let mut v = y[k..].to_vec();
        v[0] -= alpha;
        let beta = 1.0 / (sigma * (sigma + y[k].abs()));

        // Q[:, k..] ← Q[:, k..] H
        let mut s = vec![0.0; n];
        for (c, &vc) in (k..n).zip(&v) {
            if vc != 0.0 {
                for (si, &qi) in s.iter_mut().zip(&self.q[c * n..(c + 1) * n]) {
                    *si += vc * qi;
                }
            }
        }
        for (c, &vc) in (k..n).zip(&v) {
            let f = beta * vc;
            if f != 0.0 {
                for (qi, &si) in self.q[c * n..(c + 1) * n].iter_mut().zip(&s) {
                    *qi -= f * si;
                }
            }
        }
        let t = beta * dot(&v, &self.qtb[k..]);
        for (qb, &vi) in self.qtb[k..].iter_mut().zip(&v) {
            *qb -= t * vi;
        }

        let rc = &mut self.r[k * n..(k + 1) * n];
        rc[..k].copy_from_slice(&y[..k]);
        rc[k] = alpha;
        rc[k + 1..].fill(0.0);
        self.cols.push(index);
        true
    }

    /// Removes the column at position `p` and restores triangular form.
    fn remove(&mut self, p: usize) {
        let n = self.n;
        let k = self.k();
        self.r.copy_within((p + 1) * n..k * n, p * n);
        self.cols.remove(p);
        let k = k - 1;
        for j in p..k {
            let (a, b) = (self.r[j * n + j], self.r[j * n + j + 1]);
            let h = a.hypot(b);
            if h == 0.0 {
                continue;
            }
            let (c, s) = (a / h, b / h);
            for col in j..k {
                let base = col * n;
                let (x, y) = (self.r[base + j], self.r[base + j + 1]);
                self.r[base + j] = c * x + s * y;
                self.r[base + j + 1] = -s * x + c * y;
            }
            self.r[j * n + j + 1] = 0.0;
            let (x, y) = (self.qtb[j], self.qtb[j + 1]);
            self.qtb[j] = c * x + s * y;
            self.qtb[j + 1] = -s * x + c * y;
            let (left, right) = self.q.split_at_mut((j + 1) * n);
            let qj = &mut left[j * n..];
            let qj1 = &mut right[..n];
            for (x, y) in qj.iter_mut().zip(qj1.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = c * a + s * b;
                *y = -s * a + c * b;
            }
        }
    }

    /// Least-squares coefficients of the current columns.
    fn solve(&self) -> Vec<f64> {
        let (n, k) = (self.n, self.k());
        let mut z = self.qtb[..k].to_vec();
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| self.r[j * n + i] * z[j]).sum();
            z[i] = (z[i] - s) / self.r[i * n + i];
        }
        z
    }
}

/// Re-solves the restricted problem on `support` with a fresh Householder QR.
fn polish(a: &DMatrix<f64>, b: &[f64], support: &[usize]) -> Option<Vec<f64>> {
    let sub = a.select_columns(support);
    let qr = sub.qr();
    let mut rhs = DVector::from_column_slice(b);
    qr.q_tr_mul(&mut rhs);
    let k = support.len();
    let r = qr.r();
    let z = r.solve_upper_triangular(&rhs.rows(0, k).into_owned())?;
    z.iter().all(|v| v.is_finite()).then(|| z.as_slice().to_vec())
}

/// Nonnegative least squares by the Lawson-Hanson active-set method.
///
/// Ties in the entering-column choice go to the lowest index. The returned
/// solution has at most `min(N, M)` nonzeros.
pub fn nnls(a: &DMatrix<f64>, b: &[f64], opts: &NnlsOptions) -> Result<NnlsSolution> {
    let (n, m) = a.shape();
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("NNLS matrix has an empty dimension".into()));
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("NNLS tolerance must be positive, got {}", opts.tol)));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let max_iterations = opts.max_iterations.unwrap_or(10 * n);

    let mut u = vec![0.0; m];
    let mut passive = vec![false; m];
    let scale = dual(a, b, |_| true).iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let threshold = opts.tol * scale;
    let mut qr = UpdatedQr::new(n, b);
    let mut r = b.to_vec();
    let mut iterations = 0;

    let finish = |u: Vec<f64>, iterations: usize| {
        let residual_norm = norm(&residual(a, b, &u));
        let passive_set = u.iter().enumerate().filter(|(_, &v)| v > 0.0).map(|(j, _)| j).collect();
        NnlsSolution { u, residual_norm, passive_set, iterations }
    };

    'outer: while qr.k() < n.min(m) && scale > 0.0 {
        let w = dual(a, &r, |j| !passive[j]);
        let mut rejected = vec![false; m];
        let mut z = loop {
            let candidate = (0..m).filter(|&j| !passive[j] && !rejected[j] && w[j] > threshold).fold(
                None,
                |best: Option<usize>, j| match best {
                    Some(i) if w[i] >= w[j] => Some(i),
                    _ => Some(j),
                },
            );
            let Some(t) = candidate else { break 'outer };
            if !qr.push(t, column(a, t)) {
                rejected[t] = true;
                continue;
            }
            let z = qr.solve();
            if z[z.len() - 1] <= 0.0 {
                qr.remove(qr.k() - 1);
                rejected[t] = true;
                continue;
            }
            passive[t] = true;
            break z;
        };

        iterations += 1;
        if iterations > max_iterations {
            return Err(Error::NnlsNotConverged { iterations: max_iterations, best: Box::new(finish(u, iterations)) });
        }

        // Step back toward feasibility until every passive coefficient is positive.
        while z.iter().any(|&v| v <= 0.0) {
            let mut alpha = f64::INFINITY;
            let mut leaving = 0;
            for (p, (&zp, &j)) in z.iter().zip(&qr.cols).enumerate() {
                if zp <= 0.0 {
                    let step = u[j] / (u[j] - zp);
                    if step < alpha {
                        alpha = step;
                        leaving = p;
                    }
                }
            }
            for (&zp, &j) in z.iter().zip(&qr.cols) {
                u[j] += alpha * (zp - u[j]);
            }
            u[qr.cols[leaving]] = 0.0;
            for p in (0..qr.k()).rev() {
                let j = qr.cols[p];
                if u[j] <= 0.0 {
                    u[j] = 0.0;
                    passive[j] = false;
                    qr.remove(p);
                }
            }
            z = qr.solve();
        }
        for (&zp, &j) in z.iter().zip(&qr.cols) {
            u[j] = zp;
        }
        r = residual(a, b, &u);
    }

    let mut support: Vec<usize> = qr.cols.clone();
    support.sort_unstable();
    if !support.is_empty() {
        if let Some(z) = polish(a, b, &support) {
            if z.iter().all(|&v| v > 0.0) {
                let mut polished = vec![0.0; m];
                for (&j, &zj) in support.iter().zip(&z) {
                    polished[j] = zj;
                }
                if norm(&residual(a, b, &polished)) <= norm(&residual(a, b, &u)) {
                    u = polished;
                }
            }
        }
    }
    Ok(finish(u, iterations))
}
