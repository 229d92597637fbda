use rayon::prelude::*;

use crate::fem::{ElementMap, ReferenceBasis};
use crate::geometry::Mesh;
use crate::sparse::{CsrMatrix, Triplet};

use super::{DofMap, PhysicalParams};

/// Block-diagonal mass matrix: ρ₂/ρ₁ on each displacement component, 1/c² on
/// the potential.
pub fn assemble_mass(
    mesh: &Mesh,
    basis: &ReferenceBasis,
    dofs: &DofMap,
    params: &PhysicalParams,
) -> CsrMatrix {
    let n = basis.n_local;
    let triplets: Vec<Triplet> = (0..mesh.num_elements())
        .into_par_iter()
        .flat_map_iter(|t| {
            let det = ElementMap::of(mesh, t).det;
            let comps = dofs.components(t);
            let scale = if dofs.is_elastic(t) {
                params.rho2 / params.rho1
            } else {
                1.0 / (params.c * params.c)
            };
            let mut out = Vec::with_capacity(comps * n * n);
            for comp in 0..comps {
                for i in 0..n {
                    for j in 0..n {
                        out.push((
                            dofs.index(t, comp, i),
                            dofs.index(t, comp, j),
                            scale * det * basis.mass[(i, j)],
                        ));
                    }
                }
            }
            out
        })
        .collect();
    CsrMatrix::from_triplets(dofs.size, dofs.size, triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_annulus_mesh, CurvedBoundary, Subdomain, Triangle};

    #[test]
    fn fluid_entries_sum_to_scaled_area() {
        let mesh = build_annulus_mesh(1.0, 2.0, 2, 12).unwrap();
        let basis = ReferenceBasis::new(2).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        let params = PhysicalParams { c: 2.0, ..Default::default() };
        let m = assemble_mass(&mesh, &basis, &dofs, &params);
        let sum: f64 = m.triplets().iter().filter(|e| dofs.is_fluid_dof(e.0)).map(|e| e.2).sum();
        let area = mesh.subdomain_area(Subdomain::Fluid);
        assert!((sum - area / 4.0).abs() < 1e-10);
    }

    #[test]
    fn doubling_rho2_doubles_elastic_block() {
        let mesh = build_annulus_mesh(1.0, 2.0, 1, 8).unwrap();
        let basis = ReferenceBasis::new(1).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        let a = assemble_mass(&mesh, &basis, &dofs, &PhysicalParams::default());
        let b = assemble_mass(&mesh, &basis, &dofs, &PhysicalParams { rho2: 2.0, ..Default::default() });
        for ((r, _, x), (_, _, y)) in a.triplets().into_iter().zip(b.triplets()) {
            if dofs.is_fluid_dof(r) {
                assert_eq!(x, y);
            } else {
                assert_eq!(2.0 * x, y);
            }
        }
    }

    #[test]
    fn single_triangle_linear_mass() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let tri = Triangle { vertices: [0, 1, 2], subdomain: Subdomain::Fluid };
        let mesh = Mesh::new(vertices, vec![tri], CurvedBoundary::default()).unwrap();
        let basis = ReferenceBasis::new(1).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        let m = assemble_mass(&mesh, &basis, &dofs, &PhysicalParams::default()).to_dense();
        let area = 0.5;
        for i in 0..3 {
            for j in 0..3 {
                let expected = area / 12.0 * if i == j { 2.0 } else { 1.0 };
                assert!((m[(i, j)] - expected).abs() < 1e-15);
            }
        }
    }
}
