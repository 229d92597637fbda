use rayon::prelude::*;

use crate::assembly::{assemble_mass, assemble_stiffness, assemble_stiffness_terms, DofMap, PenaltyParams, PhysicalParams, StiffnessTerms};
use crate::fem::{ElementMap, ReferenceBasis};
use crate::geometry::Mesh;
use crate::sparse::CsrMatrix;
use crate::timestepper::State;

use super::DiscreteField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyKind {
    /// Kinetic energy of (u_t, φ_t) plus strain and gradient energy of (u, φ).
    E,
    /// The same one time derivative higher.
    F,
}

/// E or F of a state, by quadrature.
pub fn energy_monitor(
    state: &State,
    mesh: &Mesh,
    basis: &ReferenceBasis,
    dofs: &DofMap,
    params: &PhysicalParams,
    which: EnergyKind,
) -> f64 {
    let (kinetic, potential) = match which {
        EnergyKind::E => (&state.v, &state.u),
        EnergyKind::F => (&state.w, &state.v),
    };
    let kin = DiscreteField::new(mesh, basis, dofs, kinetic);
    let pot = DiscreteField::new(mesh, basis, dofs, potential);
    let parts: Vec<f64> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|t| {
            let map = ElementMap::of(mesh, t);
            let scale = if dofs.is_elastic(t) { params.rho2 / params.rho1 } else { 1.0 / (params.c * params.c) };
            let mut sum = 0.0;
            for (q, w) in basis.volume_rule.weights.iter().enumerate() {
                let k = kin.combine(t, &map, &basis.values[q], &basis.grads[q]);
                let p = pot.combine(t, &map, &basis.values[q], &basis.grads[q]);
                sum += w * map.det * (scale * k.value_squared() + p.energy_density(params));
            }
            sum
        })
        .collect();
    parts.iter().sum()
}

/// Quadratic forms behind the energy monitors, assembled once per run.
#[derive(Debug, Clone)]
pub struct EnergyForms {
    pub mass: CsrMatrix,
    /// Volume part of the stiffness matrix.
    pub volume: CsrMatrix,
    /// Full stiffness matrix.
    pub full: CsrMatrix,
    pub step: f64,
}

impl EnergyForms {
    pub fn new(
        mesh: &Mesh,
        basis: &ReferenceBasis,
        dofs: &DofMap,
        params: &PhysicalParams,
        penalty: &PenaltyParams,
        step: f64,
    ) -> Self {
        EnergyForms {
            mass: assemble_mass(mesh, basis, dofs, params),
            volume: assemble_stiffness_terms(mesh, basis, dofs, params, penalty, StiffnessTerms::VOLUME),
            full: assemble_stiffness(mesh, basis, dofs, params, penalty),
            step,
        }
    }

    /// Reuse already assembled mass and stiffness matrices.
    pub fn from_parts(mass: CsrMatrix, volume: CsrMatrix, full: CsrMatrix, step: f64) -> Self {
        EnergyForms { mass, volume, full, step }
    }

    /// VᵀMV + Uᵀ A_vol U
    pub fn e(&self, s: &State) -> f64 {
        self.mass.bilinear(&s.v, &s.v) + self.volume.bilinear(&s.u, &s.u)
    }

    /// WᵀMW + Vᵀ A_vol V
    pub fn f(&self, s: &State) -> f64 {
        self.mass.bilinear(&s.w, &s.w) + self.volume.bilinear(&s.v, &s.v)
    }

    /// ‖V - (l/2)W‖²_M + Uᵀ A (U - lV + (l²/2)W), i.e. the staggered energy
    /// ‖(Uₙ - Uₙ₋₁)/l‖²_M + Uₙᵀ A Uₙ₋₁ of the explicit scheme written with
    /// the state at level n. With γ = 1/2, δ = 0 and no load it never
    /// increases; it is positive only while l is below the stability limit.
    pub fn discrete(&self, s: &State) -> f64 {
        let l = self.step;
        let half: Vec<f64> = s.v.iter().zip(&s.w).map(|(v, w)| v - 0.5 * l * w).collect();
        let prev: Vec<f64> = (0..s.u.len()).map(|i| s.u[i] - l * s.v[i] + 0.5 * l * l * s.w[i]).collect();
        self.mass.bilinear(&half, &half) + self.full.bilinear(&s.u, &prev)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::make_basis;
    use crate::geometry::{build_annulus_mesh, Subdomain};
    use rand::{Rng, SeedableRng};

    #[test]
    fn zero_state_has_zero_energy() {
        let mesh = build_annulus_mesh(1.0, 2.0, 1, 8).unwrap();
        let basis = make_basis(1).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        let s = State::zeros(dofs.size);
        let p = PhysicalParams::default();
        assert_eq!(energy_monitor(&s, &mesh, &basis, &dofs, &p, EnergyKind::E), 0.0);
        assert_eq!(energy_monitor(&s, &mesh, &basis, &dofs, &p, EnergyKind::F), 0.0);
    }

    #[test]
    fn unit_potential_rate_gives_area_over_c_squared() {
        let mesh = build_annulus_mesh(1.0, 2.0, 2, 12).unwrap();
        let basis = make_basis(2).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        let mut s = State::zeros(dofs.size);
        s.v = dofs.project(&mesh, &basis, |_| [0.0; 2], |_| 1.0);
        let p = PhysicalParams { c: 1.7, ..Default::default() };
        let e = energy_monitor(&s, &mesh, &basis, &dofs, &p, EnergyKind::E);
        let expected = mesh.subdomain_area(Subdomain::Fluid) / (1.7 * 1.7);
        assert!((e - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn quadrature_and_matrix_forms_agree() {
        let mesh = build_annulus_mesh(1.0, 2.0, 2, 12).unwrap();
        let p = PhysicalParams { rho2: 2.5, lambda: 1.4, mu: 0.6, c: 0.8, rho1: 1.1 };
        let pen = PenaltyParams::default();
        let mut rng = rand::rngs::StdRng::seed_from_u64(2);
        for k in 1..=3 {
            let basis = make_basis(k).unwrap();
            let dofs = DofMap::new(&mesh, &basis);
            let forms = EnergyForms::new(&mesh, &basis, &dofs, &p, &pen, 0.01);
            let mut s = State::zeros(dofs.size);
            for x in s.u.iter_mut().chain(s.v.iter_mut()).chain(s.w.iter_mut()) {
                *x = rng.gen_range(-1.0..1.0);
            }
            let e = energy_monitor(&s, &mesh, &basis, &dofs, &p, EnergyKind::E);
            let f = energy_monitor(&s, &mesh, &basis, &dofs, &p, EnergyKind::F);
            assert!((e - forms.e(&s)).abs() <= 1e-11 * e, "k={k}");
            assert!((f - forms.f(&s)).abs() <= 1e-11 * f, "k={k}");
        }
    }

    #[test]
    fn discrete_energy_never_increases_without_load() {
        use crate::assembly::{LoadAssembler, SystemMatrices};
        use crate::timestepper::{run, EnergyRecorder, NewmarkParams, Observer};
        use crate::waves::IncidentWave;
        let mesh = build_annulus_mesh(1.0, 2.0, 1, 8).unwrap();
        let basis = make_basis(1).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        let p = PhysicalParams::default();
        let pen = PenaltyParams::default();
        let sys = SystemMatrices::assemble(&mesh, &basis, &dofs, &p, &pen).unwrap();
        let load = LoadAssembler::new(&mesh, &basis, &dofs);
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let u0: Vec<f64> = (0..dofs.size).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v0: Vec<f64> = (0..dofs.size).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let l = mesh.mesh_size / 60.0;
        let forms = EnergyForms::new(&mesh, &basis, &dofs, &p, &pen, l);
        let mut rec = EnergyRecorder::new(&forms, 1);
        let params = NewmarkParams::explicit(l, 200.0 * l);
        run(&sys, &load, &IncidentWave::Zero, params, u0, v0, &mut [&mut rec as &mut dyn Observer]).unwrap();
        let h0 = rec.records[0].discrete;
        assert!(h0 > 0.0);
        for w in rec.records.windows(2) {
            assert!(w[1].discrete <= w[0].discrete + 1e-12 * h0, "{} -> {}", w[0].discrete, w[1].discrete);
        }
        assert!(rec.records.last().unwrap().discrete < h0);
    }
}
