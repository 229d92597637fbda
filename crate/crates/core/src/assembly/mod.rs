//! Semidiscrete system M Ü + N U̇ + A U = f assembled from the interior
//! penalty forms.

mod coercivity;
mod damping;
mod dofmap;
mod edges;
mod jumps;
mod load;
mod mass;
mod params;
mod stiffness;

pub use coercivity::{check_coercivity, CoercivityReport, DENSE_EIGEN_LIMIT};
pub use damping::assemble_damping;
pub use dofmap::DofMap;
pub use edges::{EdgeQuadrature, EdgeSide};
pub use jumps::assemble_jump_gram;
pub use load::{assemble_load, LoadAssembler};
pub use mass::assemble_mass;
pub use params::{ElasticJump, PenaltyParams, PhysicalParams};
pub use stiffness::{assemble_stiffness, assemble_stiffness_terms, StiffnessTerms};

use crate::fem::ReferenceBasis;
use crate::geometry::Mesh;
use crate::sparse::CsrMatrix;

#[derive(Debug, thiserror::Error)]
pub enum AssemblyError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("stiffness matrix is not symmetric: max |A - Aᵀ| = {residual:e} exceeds {threshold:e}")]
    Asymmetric { residual: f64, threshold: f64 },
}

/// The three matrices of the semidiscrete system.
#[derive(Debug, Clone)]
pub struct SystemMatrices {
    pub mass: CsrMatrix,
    pub damping: CsrMatrix,
    pub stiffness: CsrMatrix,
}

impl SystemMatrices {
    pub fn assemble(
        mesh: &Mesh,
        basis: &ReferenceBasis,
        dofs: &DofMap,
        params: &PhysicalParams,
        penalty: &PenaltyParams,
    ) -> Result<Self, AssemblyError> {
        params.validate()?;
        penalty.validate()?;
        Ok(SystemMatrices {
            mass: assemble_mass(mesh, basis, dofs, params),
            damping: assemble_damping(mesh, basis, dofs),
            stiffness: assemble_stiffness(mesh, basis, dofs, params, penalty),
        })
    }
}
