use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::assembly::DofMap;
use crate::diagnostics::EnergyForms;
use crate::fem::{ReferenceBasis, REFERENCE_VERTICES};
use crate::geometry::Mesh;

use super::{SolveStats, State};

pub trait Observer {
    fn observe(&mut self, step: usize, state: &State, stats: &SolveStats) -> io::Result<()>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub step: usize,
    pub t: f64,
    /// VᵀMV + Uᵀ A_vol U
    pub e: f64,
    /// WᵀMW + Vᵀ A_vol V
    pub f: f64,
    /// Staggered energy of the explicit scheme, see `EnergyForms::discrete`.
    pub discrete: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Records the energies every `stride` steps (and always at step 0).
pub struct EnergyRecorder<'a> {
    pub forms: &'a EnergyForms,
    pub stride: usize,
    pub records: Vec<EnergyRecord>,
}

impl<'a> EnergyRecorder<'a> {
    pub fn new(forms: &'a EnergyForms, stride: usize) -> Self {
        EnergyRecorder { forms, stride: stride.max(1), records: Vec::new() }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        Self::write_records(&self.records, w)
    }

    /// CSV with one row per record.
    pub fn write_records<W: Write>(records: &[EnergyRecord], mut w: W) -> io::Result<()> {
        writeln!(w, "step,t,E,F,discrete_energy,iterations,residual")?;
        for r in records {
            writeln!(
                w,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}",
                r.step, r.t, r.e, r.f, r.discrete, r.iterations, r.residual
            )?;
        }
        Ok(())
    }
}

impl Observer for EnergyRecorder<'_> {
    fn observe(&mut self, step: usize, state: &State, stats: &SolveStats) -> io::Result<()> {
        if step.is_multiple_of(self.stride) {
            self.records.push(EnergyRecord {
                step,
                t: state.t,
                e: self.forms.e(state),
                f: self.forms.f(state),
                discrete: self.forms.discrete(state),
                iterations: stats.iterations,
                residual: stats.residual,
            });
        }
        Ok(())
    }
}

/// Legacy VTK snapshots of the discontinuous fields (each element keeps its
/// own copy of its corner values).
pub struct VtkSnapshots<'a> {
    pub mesh: &'a Mesh,
    pub basis: &'a ReferenceBasis,
    pub dofs: &'a DofMap,
    pub dir: PathBuf,
    pub stride: usize,
    pub written: Vec<PathBuf>,
}

impl<'a> VtkSnapshots<'a> {
    pub fn new(mesh: &'a Mesh, basis: &'a ReferenceBasis, dofs: &'a DofMap, dir: &Path, stride: usize) -> Self {
        VtkSnapshots { mesh, basis, dofs, dir: dir.to_path_buf(), stride: stride.max(1), written: Vec::new() }
    }

    pub fn render(&self, state: &State) -> String {
        let mesh = self.mesh;
        let ne = mesh.num_elements();
        let corner_values: Vec<Vec<f64>> = REFERENCE_VERTICES.iter().map(|&p| self.basis.eval(p)).collect();
        let eval = |t: usize, comp: usize, corner: usize| -> f64 {
            let c = self.dofs.local(&state.u, t, comp);
            corner_values[corner].iter().zip(c).map(|(a, b)| a * b).sum()
        };
        let mut s = String::new();
        let _ = writeln!(s, "# vtk DataFile Version 3.0\nfields at t = {:.9e}\nASCII\nDATASET UNSTRUCTURED_GRID", state.t);
        let _ = writeln!(s, "POINTS {} double", 3 * ne);
        for t in 0..ne {
            for p in mesh.corners(t) {
                let _ = writeln!(s, "{:.12e} {:.12e} 0", p[0], p[1]);
            }
        }
        let _ = writeln!(s, "CELLS {} {}", ne, 4 * ne);
        for t in 0..ne {
            let _ = writeln!(s, "3 {} {} {}", 3 * t, 3 * t + 1, 3 * t + 2);
        }
        let _ = writeln!(s, "CELL_TYPES {ne}");
        for _ in 0..ne {
            s.push_str("5\n");
        }
        let _ = writeln!(s, "POINT_DATA {}\nVECTORS u double", 3 * ne);
        for t in 0..ne {
            for k in 0..3 {
                let (u1, u2) = if self.dofs.is_elastic(t) { (eval(t, 0, k), eval(t, 1, k)) } else { (0.0, 0.0) };
                let _ = writeln!(s, "{u1:.12e} {u2:.12e} 0");
            }
        }
        s.push_str("SCALARS phi double 1\nLOOKUP_TABLE default\n");
        for t in 0..ne {
            for k in 0..3 {
                let v = if self.dofs.is_elastic(t) { 0.0 } else { eval(t, 0, k) };
                let _ = writeln!(s, "{v:.12e}");
            }
        }
        s
    }
}

impl Observer for VtkSnapshots<'_> {
    fn observe(&mut self, step: usize, state: &State, _: &SolveStats) -> io::Result<()> {
        if !step.is_multiple_of(self.stride) {
            return Ok(());
        }
        let path = self.dir.join(format!("snapshot_{step:06}.vtk"));
        std::fs::write(&path, self.render(state))?;
        self.written.push(path);
        Ok(())
    }
}
