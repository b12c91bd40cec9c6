//! End-to-end experiment: mesh, CATCH submesh, operator norms and
//! reconstruction errors for a list of degrees, plus the reference
//! values they are compared against.

use serde::{Deserialize, Serialize};

use crate::catch::{extract_catch_submesh, CatchOptions, CatchSubmesh};
use crate::error::Result;
use crate::ls_fit::{control_grid, default_control_size, sup_error, FitMethod, FitReport, LsProjector, TestFunction};
use crate::sh_basis::dimension;
use crate::sphere::{build_optimal_mesh, MeshCardinalityPolicy, PointConfiguration, PolynomialMesh};

pub const TABLE_DEGREES: [usize; 7] = [2, 5, 8, 11, 14, 17, 20];

/// Reference zonal-mesh statistics, QP (NNLS) extraction, one entry per
/// degree of [`TABLE_DEGREES`].
pub mod reference {
    pub const CARD_MESH: [usize; 7] = [181, 1187, 3074, 5844, 9496, 14029, 19445];
    pub const CARD_CATCH: [usize; 7] = [25, 121, 289, 529, 841, 1225, 1681];
    pub const COMPRESSION_RATIO: [f64; 7] = [7.2, 9.8, 10.6, 11.0, 11.3, 11.5, 11.6];
    pub const W_MAX_OVER_AVG: [f64; 7] = [2.2, 2.6, 2.5, 2.5, 2.6, 2.4, 2.6];
    pub const W_MIN_OVER_AVG: [f64; 7] = [2.1e-2, 5.4e-4, 7.6e-5, 8.8e-6, 2.4e-6, 8.1e-6, 2.6e-6];
    pub const LAMBDA_MESH: [f64; 7] = [2.2, 3.3, 4.2, 4.9, 5.6, 6.2, 6.7];
    pub const LAMBDA_CATCH: [f64; 7] = [2.5, 3.7, 4.6, 5.4, 6.0, 6.5, 7.1];

    /// Sup-norm reconstruction errors, indexed `[function − 1][degree]`.
    pub const ERRORS_LS: [[f64; 7]; 3] = [
        [1.4e5, 4.1e4, 1.5e4, 5.3e2, 3.7e1, 8.4e-10, 9.1e-10],
        [1.3e-1, 1.6e-3, 5.1e-6, 5.9e-9, 3.3e-12, 5.6e-15, 6.2e-15],
        [5.0e-1, 3.2e-1, 1.5e-1, 1.4e-1, 9.5e-2, 9.2e-2, 7.4e-2],
    ];
    pub const ERRORS_CATCH: [[f64; 7]; 3] = [
        [1.7e5, 4.8e4, 1.4e4, 5.1e2, 3.7e1, 8.4e-10, 6.4e-10],
        [1.7e-1, 1.7e-3, 5.1e-6, 6.0e-9, 3.3e-12, 2.8e-15, 1.9e-15],
        [6.0e-1, 3.4e-1, 1.9e-1, 1.6e-1, 1.2e-1, 9.7e-2, 7.4e-2],
    ];

    pub fn position(n: usize) -> Option<usize> {
        super::TABLE_DEGREES.iter().position(|&d| d == n)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub policy: MeshCardinalityPolicy,
    pub catch: CatchOptions,
    /// Control-grid size; `None` uses [`default_control_size`].
    pub control_size: Option<usize>,
    pub operator_norms: bool,
    pub functions: Vec<TestFunction>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            policy: MeshCardinalityPolicy::default(),
            catch: CatchOptions::default(),
            control_size: None,
            operator_norms: true,
            functions: TestFunction::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionError {
    pub function: u32,
    pub method: FitMethod,
    pub sup_error: f64,
}

/// Everything computed for one degree.
#[derive(Debug, Clone)]
pub struct DegreeResult {
    pub n: usize,
    pub mesh: PolynomialMesh,
    pub submesh: CatchSubmesh,
    pub lambda_mesh: Option<f64>,
    pub lambda_catch: Option<f64>,
    pub condition_mesh: f64,
    pub condition_catch: f64,
    pub errors: Vec<ReconstructionError>,
}

impl DegreeResult {
    pub fn error(&self, f: TestFunction, method: FitMethod) -> Option<f64> {
        self.errors.iter().find(|e| e.function == f.id() && e.method == method).map(|e| e.sup_error)
    }

    pub fn fit_report(&self, f: TestFunction, method: FitMethod) -> Option<FitReport> {
        let sup_error = self.error(f, method)?;
        let (operator_norm, condition_estimate, catch) = match method {
            FitMethod::FullMeshLs => (self.lambda_mesh, self.condition_mesh, None),
            FitMethod::CatchWeightedLs => (self.lambda_catch, self.condition_catch, Some(&self.submesh)),
        };
        Some(FitReport {
            n: self.n,
            method,
            sup_error,
            operator_norm: operator_norm.unwrap_or(f64::NAN),
            condition_estimate,
            catch_cardinality: catch.map(CatchSubmesh::cardinality),
            compression_ratio: catch.map(CatchSubmesh::compression_ratio),
        })
    }
}

/// Projectors for plain least squares on a mesh and weighted least squares on its submesh.
pub fn projectors(mesh: &PolynomialMesh, sub: &CatchSubmesh) -> Result<(LsProjector, LsProjector)> {
    let full = LsProjector::new(&mesh.config, &vec![1.0; mesh.len()], mesh.degree)?;
    let weighted = LsProjector::new(&sub.points, &sub.weights, mesh.degree)?;
    Ok((full, weighted))
}

pub fn run_degree(n: usize, cfg: &ExperimentConfig) -> Result<DegreeResult> {
    let mesh = build_optimal_mesh(n, &cfg.policy)?;
    let submesh = extract_catch_submesh(&mesh, &cfg.catch)?;
    let control = control_grid(cfg.control_size.unwrap_or_else(|| default_control_size(n)))?;
    run_with(mesh, submesh, &control, cfg)
}

/// Norms and errors for an already extracted submesh.
pub fn run_with(
    mesh: PolynomialMesh,
    submesh: CatchSubmesh,
    control: &PointConfiguration,
    cfg: &ExperimentConfig,
) -> Result<DegreeResult> {
    let n = mesh.degree;
    let (full, weighted) = projectors(&mesh, &submesh)?;
    let (lambda_mesh, lambda_catch) = if cfg.operator_norms {
        (Some(full.operator_norm(control)?), Some(weighted.operator_norm(control)?))
    } else {
        (None, None)
    };
    let mut errors = Vec::new();
    for &f in &cfg.functions {
        let eval = |p: &crate::sphere::SpherePoint| f.eval(p);
        let c = full.fit(&f.sample(&mesh.config))?;
        errors.push(ReconstructionError {
            function: f.id(),
            method: FitMethod::FullMeshLs,
            sup_error: sup_error(&c, eval, control)?,
        });
        let c = weighted.fit(&f.sample(&submesh.points))?;
        errors.push(ReconstructionError {
            function: f.id(),
            method: FitMethod::CatchWeightedLs,
            sup_error: sup_error(&c, eval, control)?,
        });
    }
    Ok(DegreeResult {
        n,
        condition_mesh: full.condition_estimate(),
        condition_catch: weighted.condition_estimate(),
        mesh,
        submesh,
        lambda_mesh,
        lambda_catch,
        errors,
    })
}

/// One row of the mesh/submesh statistics table, computed next to the
/// reference value where one exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub n: usize,
    pub card_mesh: usize,
    pub ref_card_mesh: Option<usize>,
    pub card_catch: usize,
    pub ref_card_catch: Option<usize>,
    /// `card_catch == (2n+1)²`.
    pub catch_full: bool,
    pub compression_ratio: f64,
    pub ref_compression_ratio: Option<f64>,
    pub w_max_over_avg: f64,
    pub ref_w_max_over_avg: Option<f64>,
    pub w_min_over_avg: f64,
    pub ref_w_min_over_avg: Option<f64>,
    pub lambda_mesh: Option<f64>,
    pub ref_lambda_mesh: Option<f64>,
    pub sqrt_model: f64,
    pub lambda_catch: Option<f64>,
    pub ref_lambda_catch: Option<f64>,
}

impl Table1Row {
    pub const HEADER: [&'static str; 17] = [
        "n",
        "card_mesh",
        "ref_card_mesh",
        "card_catch",
        "ref_card_catch",
        "catch_full",
        "compression_ratio",
        "ref_compression_ratio",
        "w_max_over_avg",
        "ref_w_max_over_avg",
        "w_min_over_avg",
        "ref_w_min_over_avg",
        "lambda_mesh",
        "ref_lambda_mesh",
        "model_1.5_sqrt_n",
        "lambda_catch",
        "ref_lambda_catch",
    ];

    pub fn from_result(r: &DegreeResult) -> Self {
        let pos = reference::position(r.n);
        let at_degree = |table: &[f64; 7]| pos.map(|i| table[i]);
        let stats = r.submesh.weight_stats();
        Self {
            n: r.n,
            card_mesh: r.mesh.len(),
            ref_card_mesh: pos.map(|i| reference::CARD_MESH[i]),
            card_catch: r.submesh.cardinality(),
            ref_card_catch: pos.map(|i| reference::CARD_CATCH[i]),
            catch_full: r.submesh.cardinality() == dimension(2 * r.n),
            compression_ratio: r.submesh.compression_ratio(),
            ref_compression_ratio: at_degree(&reference::COMPRESSION_RATIO),
            w_max_over_avg: stats.max / stats.avg,
            ref_w_max_over_avg: at_degree(&reference::W_MAX_OVER_AVG),
            w_min_over_avg: stats.min / stats.avg,
            ref_w_min_over_avg: at_degree(&reference::W_MIN_OVER_AVG),
            lambda_mesh: r.lambda_mesh,
            ref_lambda_mesh: at_degree(&reference::LAMBDA_MESH),
            sqrt_model: 1.5 * (r.n as f64).sqrt(),
            lambda_catch: r.lambda_catch,
            ref_lambda_catch: at_degree(&reference::LAMBDA_CATCH),
        }
    }

    /// Cardinalities that must agree exactly with the reference ones.
    pub fn card_mesh_matches(&self) -> bool {
        self.ref_card_mesh.is_none_or(|p| p == self.card_mesh)
    }

    pub fn fields(&self, fmt: impl Fn(f64) -> String) -> Vec<String> {
        let opt_f = |v: Option<f64>| v.map(&fmt).unwrap_or_default();
        let opt_u = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.n.to_string(),
            self.card_mesh.to_string(),
            opt_u(self.ref_card_mesh),
            self.card_catch.to_string(),
            opt_u(self.ref_card_catch),
            self.catch_full.to_string(),
            fmt(self.compression_ratio),
            opt_f(self.ref_compression_ratio),
            fmt(self.w_max_over_avg),
            opt_f(self.ref_w_max_over_avg),
            fmt(self.w_min_over_avg),
            opt_f(self.ref_w_min_over_avg),
            opt_f(self.lambda_mesh),
            opt_f(self.ref_lambda_mesh),
            fmt(self.sqrt_model),
            opt_f(self.lambda_catch),
            opt_f(self.ref_lambda_catch),
        ]
    }
}

/// One cell of the reconstruction-error table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub function: u32,
    pub method: FitMethod,
    pub n: usize,
    pub sup_error: f64,
    pub ref_sup_error: Option<f64>,
}

impl Table2Row {
    pub const HEADER: [&'static str; 5] = ["function", "method", "n", "sup_error", "ref_sup_error"];

    pub fn from_result(r: &DegreeResult) -> Vec<Self> {
        let pos = reference::position(r.n);
        r.errors
            .iter()
            .map(|e| {
                let table = match e.method {
                    FitMethod::FullMeshLs => &reference::ERRORS_LS,
                    FitMethod::CatchWeightedLs => &reference::ERRORS_CATCH,
                };
                Table2Row {
                    function: e.function,
                    method: e.method,
                    n: r.n,
                    sup_error: e.sup_error,
                    ref_sup_error: pos.map(|i| table[e.function as usize - 1][i]),
                }
            })
            .collect()
    }

    pub fn fields(&self, fmt: impl Fn(f64) -> String) -> Vec<String> {
        vec![
            format!("f{}", self.function),
            self.method.to_string(),
            self.n.to_string(),
            fmt(self.sup_error),
            self.ref_sup_error.map(&fmt).unwrap_or_default(),
        ]
    }
}
