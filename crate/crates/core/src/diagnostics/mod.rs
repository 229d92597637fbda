//! Norms, energies, cross-mesh errors and convergence reports.

mod convergence;
mod cross_mesh;
mod energy;
mod field;
mod norms;

pub use convergence::{ConvergenceReport, ErrorRecord};
pub use cross_mesh::{cross_mesh_error, CrossMeshError};
pub use energy::{energy_monitor, EnergyForms, EnergyKind};
pub use field::{DiscreteField, LocalValue};
pub use norms::{dg_energy_norm, dg_energy_norms, dg_energy_seminorm, l2_norm, l2_norms, FieldNorms, NormOptions};
