//! Reference-element polynomial spaces, quadrature and affine maps.

pub mod basis;
pub mod map;
pub mod projection;
pub mod quadrature;

pub use basis::{edge_point, ReferenceBasis, MAX_DEGREE, REFERENCE_VERTICES};
pub use map::{map_gradient, ElementMap};
pub use projection::{l2_project, project_element};
pub use quadrature::{gauss_legendre, EdgeRule, TriangleRule};

#[derive(Debug, thiserror::Error)]
pub enum FemError {
    #[error("unsupported polynomial degree {0} (expected 1..=4)")]
    UnsupportedDegree(usize),
    #[error("degenerate element (Jacobian determinant {det:e})")]
    DegenerateElement { det: f64 },
}

/// Convenience alias kept for callers that think in terms of `make_basis`.
pub fn make_basis(degree: usize) -> Result<ReferenceBasis, FemError> {
    ReferenceBasis::new(degree)
}
