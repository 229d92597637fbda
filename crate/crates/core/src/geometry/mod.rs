//! Triangular meshes of the coupled elastic/fluid domain.

mod annulus;
mod locate;
mod mesh;
mod msh;
mod refine;

pub use annulus::build_annulus_mesh;
pub use locate::{descend, locate_point, INSIDE_TOL};
pub use mesh::{CurvedBoundary, Edge, EdgeKind, Hierarchy, Mesh, Subdomain, Triangle};
pub use msh::{
    import_msh, parse_msh, parse_msh_free_elastic, write_msh, PHYSICAL_ELASTIC, PHYSICAL_FLUID,
};
pub use refine::{refine_hierarchy, refine_uniform};

/// A point in the plane.
pub type Point = [f64; 2];

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("invalid mesh parameters: {0}")]
    InvalidParameters(String),
    #[error("element {element} is degenerate (signed area {area:e})")]
    DegenerateElement { element: usize, area: f64 },
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("cannot classify edge {vertices:?}: {reason}")]
    UnclassifiableEdge { vertices: [usize; 2], reason: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("point {point:?} is outside the mesh (distance {distance:e})")]
    PointNotFound { point: Point, distance: f64 },
}
