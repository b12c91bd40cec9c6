//! Optimal polynomial meshes on the sphere and their Caratheodory-Tchakaloff
//! (CATCH) submeshes.
//!
//! * [`sphere`]: zonal equal-area point sets, covering radii and the mesh
//!   sizes that make them norming sets for spherical polynomials.
//! * [`sh_basis`]: real orthonormal spherical harmonics and Vandermonde matrices.
//! * [`nnls`]: Lawson-Hanson nonnegative least squares.
//! * [`catch`]: compression of a discrete measure to at most `dim P_2n` nodes
//!   with positive weights, exact up to degree `2n`.
//! * [`ls_fit`]: plain and CATCH-weighted least squares with operator-norm estimates.
//! * [`padua`]: Padua-point meshes of the square.
//! * [`tables`]: end-to-end experiment drivers.
//! * [`io`]: CSV and JSON formats.

pub mod catch;
pub mod error;
pub mod io;
pub mod ls_fit;
pub mod nnls;
pub mod padua;
pub mod sh_basis;
pub mod sphere;
pub mod tables;

pub use catch::{
    compress_measure, compress_with_basis, exactness_errors, extract_catch_submesh, moments, verify_exactness,
    CatchOptions, CatchReport, CatchSubmesh, CompressionStrategy, DiscreteMeasure, ExactnessReport, WeightStats,
};
pub use error::{Error, Result};
pub use ls_fit::{
    control_grid, default_control_size, evaluate_poly, ls_operator_norm, sup_error, test_function, unweighted_ls_fit,
    weighted_ls_fit, FitMethod, FitReport, HarmonicCoefficients, LsProjector, TestFunction,
};
pub use nnls::{nnls, NnlsOptions, NnlsSolution};
pub use padua::{dubiner_distance_square, padua_optimal_mesh, padua_points, PaduaSet, SquarePoint};
pub use sh_basis::{dimension, eval_basis, vandermonde, BasisIndex, VandermondeMatrix};
pub use sphere::{
    build_optimal_mesh, covering_radius, geodesic_distance, mesh_cardinality, verify_dubiner_covering,
    zonal_equal_area_points, CardinalityVariant, CoveringRadius, MeshCardinalityPolicy, PointConfiguration,
    PolynomialMesh, SpherePoint,
};
