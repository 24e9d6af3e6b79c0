//! Small dense complex linear algebra.

mod contour;
mod eigen;
mod expm;
mod lu;
mod matrix;
mod symmetric;

pub use contour::{contour_projection, contour_quadrature, reduced_resolvent, Contour};
pub use eigen::{
    cluster_tolerance, cluster_values, eigendecompose, eigenvalues, schur, Cluster, EigenSystem,
};
pub use expm::matrix_exponential;
pub use lu::{inverse, solve_linear, Lu, PIVOT_TOLERANCE};
pub use matrix::ComplexMatrix;
pub use symmetric::{symmetric_eigen, SymmetricEigen};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("rows have different lengths")]
    Ragged,
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("singular matrix: pivot {pivot:e} below threshold {threshold:e}")]
    SingularMatrix { pivot: f64, threshold: f64 },
    #[error("eigenvalue iteration did not converge after {iterations} steps")]
    ConvergenceFailure { iterations: usize },
    #[error("invalid contour: {0}")]
    InvalidContour(String),
    #[error("eigenvalue {eigenvalue} lies within {distance:e} of the contour")]
    ContourTouchesSpectrum {
        eigenvalue: num_complex::Complex64,
        distance: f64,
    },
    #[error("contour quadrature did not converge at {nodes} nodes (last change {change:e})")]
    QuadratureNotConverged { nodes: usize, change: f64 },
}
