//! Symmetric interior penalty discontinuous Galerkin solver for time-domain
//! acoustic-elastic wave interaction in two dimensions.

pub mod assembly;
pub mod config;
pub mod diagnostics;
pub mod experiment;
pub mod fem;
pub mod geometry;
pub mod sparse;
pub mod timestepper;
pub mod waves;
