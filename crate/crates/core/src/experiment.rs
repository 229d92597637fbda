//! End-to-end pipelines: mesh → assemble → integrate → measure.

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::assembly::{
    assemble_stiffness_terms, AssemblyError, DofMap, LoadAssembler, StiffnessTerms, SystemMatrices,
};
use crate::config::{ConfigError, GeometryConfig, InitialConfig, SimulationConfig, StepRule, WaveConfig};
use crate::diagnostics::{cross_mesh_error, ConvergenceReport, CrossMeshError, DiscreteField, EnergyForms, NormOptions};
use crate::fem::{FemError, ReferenceBasis};
use crate::geometry::{build_annulus_mesh, import_msh, refine_hierarchy, CurvedBoundary, GeometryError, Mesh};
use crate::timestepper::{self, EnergyRecord, EnergyRecorder, NewmarkParams, Observer, State, TimeError, VtkSnapshots};
use crate::waves::IncidentWave;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Time(#[from] TimeError),
    #[error(transparent)]
    CrossMesh(#[from] CrossMeshError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ExperimentError {
    /// Configuration and input problems, as opposed to numerical failures.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            ExperimentError::Config(_)
                | ExperimentError::Io { .. }
                | ExperimentError::Geometry(GeometryError::Io { .. } | GeometryError::Parse { .. })
        )
    }
}

/// The configured mesh before the `refine` refinements.
pub fn base_mesh(cfg: &SimulationConfig) -> Result<Mesh, ExperimentError> {
    match &cfg.geometry {
        GeometryConfig::Annulus { inner_radius, outer_radius, n_radial, n_angular } => {
            Ok(build_annulus_mesh(*inner_radius, *outer_radius, *n_radial, *n_angular)?)
        }
        GeometryConfig::Msh { path, interface_radius, outer_radius } => {
            let boundary = CurvedBoundary { center: [0.0, 0.0], interface_radius: *interface_radius, outer_radius: *outer_radius };
            Ok(import_msh(path, boundary)?)
        }
    }
}

/// Meshes at `refine`, `refine + 1`, ..., `refine + extra` refinements,
/// linked through the hierarchy.
pub fn mesh_levels(cfg: &SimulationConfig, extra: usize) -> Result<Vec<Arc<Mesh>>, ExperimentError> {
    let all = refine_hierarchy(base_mesh(cfg)?, cfg.refine + extra)?;
    Ok(all[cfg.refine..].to_vec())
}

/// Time step for a mesh of size `h`. Mesh-relative steps are shortened so
/// the final time is reached exactly.
pub fn time_step(cfg: &SimulationConfig, h: f64) -> f64 {
    match cfg.step {
        StepRule::Fixed(l) => l,
        StepRule::MeshFraction(f) => {
            let target = f * h;
            let n = (cfg.final_time / target * (1.0 - 1e-12)).ceil().max(1.0);
            cfg.final_time / n
        }
    }
}

pub fn newmark_params(cfg: &SimulationConfig, h: f64) -> NewmarkParams {
    NewmarkParams { gamma: cfg.gamma, delta: cfg.delta, step: time_step(cfg, h), final_time: cfg.final_time }
}

pub fn incident_wave(cfg: &SimulationConfig) -> IncidentWave {
    match cfg.wave {
        WaveConfig::Plane { direction } => IncidentWave::plane(direction).expect("config rejects zero directions"),
        WaveConfig::Pulse { source, mode } => IncidentWave::pulse(source, mode, cfg.physics.c),
        WaveConfig::Zero => IncidentWave::Zero,
    }
}

/// Projected initial displacement/potential.
pub fn initial_data(cfg: &SimulationConfig, mesh: &Mesh, basis: &ReferenceBasis, dofs: &DofMap) -> Vec<f64> {
    match cfg.initial {
        InitialConfig::Zero => vec![0.0; dofs.size],
        InitialConfig::Bump { center, width, amplitude } => {
            let g = move |x: [f64; 2]| {
                let r2 = (x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2);
                amplitude * (-r2 / (width * width)).exp()
            };
            dofs.project(mesh, basis, |x| [g(x), g(x)], g)
        }
    }
}

/// Everything assembled for one mesh.
pub struct Discretization {
    pub mesh: Arc<Mesh>,
    pub basis: ReferenceBasis,
    pub dofs: DofMap,
    pub matrices: SystemMatrices,
    pub load: LoadAssembler,
}

impl Discretization {
    pub fn new(cfg: &SimulationConfig, mesh: Arc<Mesh>) -> Result<Self, ExperimentError> {
        let basis = ReferenceBasis::new(cfg.degree)?;
        let dofs = DofMap::new(&mesh, &basis);
        let matrices = SystemMatrices::assemble(&mesh, &basis, &dofs, &cfg.physics, &cfg.penalty)?;
        let load = LoadAssembler::new(&mesh, &basis, &dofs);
        Ok(Discretization { mesh, basis, dofs, matrices, load })
    }

    pub fn energy_forms(&self, cfg: &SimulationConfig, step: f64) -> EnergyForms {
        let volume = assemble_stiffness_terms(&self.mesh, &self.basis, &self.dofs, &cfg.physics, &cfg.penalty, StiffnessTerms::VOLUME);
        EnergyForms::from_parts(self.matrices.mass.clone(), volume, self.matrices.stiffness.clone(), step)
    }

    pub fn field<'a>(&'a self, coeffs: &'a [f64]) -> DiscreteField<'a> {
        DiscreteField::new(&self.mesh, &self.basis, &self.dofs, coeffs)
    }
}

pub struct RunOutput {
    pub state: State,
    pub params: NewmarkParams,
    pub energy: Vec<EnergyRecord>,
    pub snapshots: Vec<std::path::PathBuf>,
}

/// Where a run writes files, if anywhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOutputs<'a> {
    pub snapshot_dir: Option<&'a Path>,
}

pub fn simulate(cfg: &SimulationConfig, disc: &Discretization, out: RunOutputs) -> Result<RunOutput, ExperimentError> {
    let params = newmark_params(cfg, disc.mesh.mesh_size);
    let forms = disc.energy_forms(cfg, params.step);
    let mut recorder = EnergyRecorder::new(&forms, cfg.energy_stride.max(1));
    let mut vtk = match (out.snapshot_dir, cfg.snapshot_stride) {
        (Some(dir), s) if s > 0 => {
            std::fs::create_dir_all(dir).map_err(|source| ExperimentError::Io { path: dir.display().to_string(), source })?;
            Some(VtkSnapshots::new(&disc.mesh, &disc.basis, &disc.dofs, dir, s))
        }
        _ => None,
    };
    let wave = incident_wave(cfg);
    let u0 = initial_data(cfg, &disc.mesh, &disc.basis, &disc.dofs);
    let v0 = vec![0.0; disc.dofs.size];
    let state = {
        let mut observers: Vec<&mut dyn Observer> = vec![&mut recorder];
        if let Some(v) = vtk.as_mut() {
            observers.push(v);
        }
        timestepper::run(&disc.matrices, &disc.load, &wave, params, u0, v0, &mut observers)?
    };
    Ok(RunOutput {
        state,
        params,
        energy: recorder.records,
        snapshots: vtk.map(|v| v.written).unwrap_or_default(),
    })
}

/// Run every level of the hierarchy plus one finer reference level and
/// measure the errors at the final time.
pub fn convergence_study(cfg: &SimulationConfig, levels: usize) -> Result<ConvergenceReport, ExperimentError> {
    if levels < 3 {
        return Err(ConfigError::Value { key: "study.levels".into(), message: format!("need at least 3 levels, got {levels}") }.into());
    }
    let meshes = mesh_levels(cfg, levels)?;
    let runs: Vec<(Discretization, State)> = meshes
        .into_par_iter()
        .map(|m| {
            let disc = Discretization::new(cfg, m)?;
            let out = simulate(cfg, &disc, RunOutputs::default())?;
            Ok((disc, out.state))
        })
        .collect::<Result<_, ExperimentError>>()?;
    let (reference, rest) = runs.split_last().expect("levels + 1 runs");
    let opts = NormOptions { jump: cfg.penalty.elastic_jump, interface_traces: true };
    let records = rest
        .par_iter()
        .map(|(disc, state)| {
            cross_mesh_error(&disc.field(&state.u), &reference.0.field(&reference.1.u), &cfg.physics, &opts)
                .map_err(ExperimentError::from)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConvergenceReport::new(records))
}
