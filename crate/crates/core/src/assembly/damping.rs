use rayon::prelude::*;

use crate::fem::ReferenceBasis;
use crate::geometry::{EdgeKind, Mesh};
use crate::sparse::{CsrMatrix, Triplet};

use super::{DofMap, EdgeQuadrature};

/// N = [[0, B], [-Bᵀ, D]] with B = ∫_Γ ψ n·v on interface edges and
/// D = ∫ ψ φ on artificial edges.
pub fn assemble_damping(mesh: &Mesh, basis: &ReferenceBasis, dofs: &DofMap) -> CsrMatrix {
    let n = basis.n_local;
    let triplets: Vec<Triplet> = (0..mesh.edges.len())
        .into_par_iter()
        .flat_map_iter(|e| {
            let mut out = Vec::new();
            match mesh.edges[e].kind {
                EdgeKind::Interface => {
                    let q = EdgeQuadrature::new(mesh, basis, e);
                    let (solid, fluid) = (&q.sides[0], &q.sides[1]);
                    for a in 0..2 {
                        for i in 0..n {
                            let row = dofs.index(solid.element, a, i);
                            for j in 0..n {
                                let col = dofs.index(fluid.element, 0, j);
                                let b: f64 = (0..q.len())
                                    .map(|k| q.weights[k] * solid.values[k][i] * fluid.values[k][j] * q.normal[a])
                                    .sum();
                                out.push((row, col, b));
                                out.push((col, row, -b));
                            }
                        }
                    }
                }
                EdgeKind::Artificial => {
                    let q = EdgeQuadrature::new(mesh, basis, e);
                    let side = &q.sides[0];
                    for i in 0..n {
                        for j in 0..n {
                            let d: f64 = (0..q.len())
                                .map(|k| q.weights[k] * side.values[k][i] * side.values[k][j])
                                .sum();
                            out.push((dofs.index(side.element, 0, i), dofs.index(side.element, 0, j), d));
                        }
                    }
                }
                _ => {}
            }
            out
        })
        .collect();
    CsrMatrix::from_triplets(dofs.size, dofs.size, triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_annulus_mesh, Subdomain};

    #[test]
    fn skew_plus_boundary_mass() {
        let mesh = build_annulus_mesh(1.0, 2.0, 1, 10).unwrap();
        let basis = ReferenceBasis::new(2).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        let nm = assemble_damping(&mesh, &basis, &dofs);
        let sym = nm.linear_combination(1.0, &nm.transpose(), 1.0);
        let on_boundary: std::collections::HashSet<usize> = mesh
            .edges_of_kind(EdgeKind::Artificial)
            .flat_map(|(_, e)| dofs.range(e.elements[0]))
            .collect();
        for (r, c, v) in sym.triplets() {
            if v != 0.0 {
                assert!(on_boundary.contains(&r) && on_boundary.contains(&c));
            }
        }
        let eig = sym.to_dense().symmetric_eigen();
        assert!(eig.eigenvalues.min() > -1e-13);
    }

    #[test]
    fn constant_fields_couple_through_closed_interface() {
        let mesh = build_annulus_mesh(1.0, 2.0, 2, 12).unwrap();
        let basis = ReferenceBasis::new(1).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        let nm = assemble_damping(&mesh, &basis, &dofs);
        let mut v = vec![0.0; dofs.size];
        let mut phi = vec![0.0; dofs.size];
        for t in 0..mesh.num_elements() {
            if mesh.triangles[t].subdomain == Subdomain::Elastic {
                for i in 0..basis.n_local {
                    v[dofs.index(t, 0, i)] = 1.0;
                }
            } else {
                for i in 0..basis.n_local {
                    phi[dofs.index(t, 0, i)] = 1.0;
                }
            }
        }
        assert!(nm.bilinear(&v, &phi).abs() < 1e-12);
    }
}
