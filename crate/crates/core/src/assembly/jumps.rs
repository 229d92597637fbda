use rayon::prelude::*;

use crate::fem::ReferenceBasis;
use crate::geometry::{EdgeKind, Mesh};
use crate::sparse::{CsrMatrix, Triplet};

use super::{DofMap, EdgeQuadrature, ElasticJump};

/// Gram matrix of the jump terms of the DG energy norm (without the 1/h
/// weight): ∫[u]·[v] on interior elastic edges, ∫[φ]·[ψ] on interior fluid
/// edges and, when `include_interface` is set, the one-sided traces
/// ∫ u·v and ∫ φ ψ on interface edges.
pub fn assemble_jump_gram(
    mesh: &Mesh,
    basis: &ReferenceBasis,
    dofs: &DofMap,
    jump: ElasticJump,
    include_interface: bool,
) -> CsrMatrix {
    let n = basis.n_local;
    const SIGN: [f64; 2] = [1.0, -1.0];
    let triplets: Vec<Triplet> = (0..mesh.edges.len())
        .into_par_iter()
        .flat_map_iter(|e| {
            let kind = mesh.edges[e].kind;
            let mut out = Vec::new();
            let wanted = matches!(kind, EdgeKind::InteriorElastic | EdgeKind::InteriorFluid)
                || (include_interface && kind == EdgeKind::Interface);
            if !wanted {
                return out;
            }
            let q = EdgeQuadrature::new(mesh, basis, e);
            let nrm = q.normal;
            let gram = |s: usize, i: usize, sp: usize, j: usize| -> f64 {
                (0..q.len())
                    .map(|k| q.weights[k] * q.sides[s].values[k][i] * q.sides[sp].values[k][j])
                    .sum()
            };
            match kind {
                EdgeKind::InteriorElastic => {
                    for s in 0..2 {
                        for sp in 0..2 {
                            let ss = SIGN[s] * SIGN[sp];
                            let (ts, tp) = (q.sides[s].element, q.sides[sp].element);
                            for i in 0..n {
                                for j in 0..n {
                                    let g = ss * gram(s, i, sp, j);
                                    for a in 0..2 {
                                        for b in 0..2 {
                                            let w = match jump {
                                                ElasticJump::Full => (a == b) as u8 as f64,
                                                ElasticJump::NormalComponent => nrm[a] * nrm[b],
                                            };
                                            if w != 0.0 {
                                                out.push((dofs.index(ts, a, i), dofs.index(tp, b, j), w * g));
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                EdgeKind::InteriorFluid => {
                    for s in 0..2 {
                        for sp in 0..2 {
                            let ss = SIGN[s] * SIGN[sp];
                            let (ts, tp) = (q.sides[s].element, q.sides[sp].element);
                            for i in 0..n {
                                for j in 0..n {
                                    out.push((dofs.index(ts, 0, i), dofs.index(tp, 0, j), ss * gram(s, i, sp, j)));
                                }
                            }
                        }
                    }
                }
                EdgeKind::Interface => {
                    for s in 0..2 {
                        let t = q.sides[s].element;
                        for comp in 0..dofs.components(t) {
                            for i in 0..n {
                                for j in 0..n {
                                    out.push((dofs.index(t, comp, i), dofs.index(t, comp, j), gram(s, i, s, j)));
                                }
                            }
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
    use crate::assembly::{assemble_stiffness_terms, PenaltyParams, PhysicalParams, StiffnessTerms};
    use crate::geometry::{build_annulus_mesh, refine_uniform};
    use std::sync::Arc;

    #[test]
    fn interior_gram_is_penalty_over_alpha_for_uniform_edges() {
        // With β = 0 the penalty weight is α on every edge, so the penalty
        // matrix equals α times the interior jump Gram.
        let mesh = build_annulus_mesh(1.0, 2.0, 1, 8).unwrap();
        let mesh = refine_uniform(&Arc::new(mesh)).unwrap();
        let basis = ReferenceBasis::new(2).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        for jump in [ElasticJump::Full, ElasticJump::NormalComponent] {
            let pen = PenaltyParams { alpha: 3.0, beta: 0.0, elastic_jump: jump };
            let p = assemble_stiffness_terms(&mesh, &basis, &dofs, &PhysicalParams::default(), &pen, StiffnessTerms::PENALTY);
            let g = assemble_jump_gram(&mesh, &basis, &dofs, jump, false);
            let diff = p.linear_combination(1.0, &g, -3.0).max_abs();
            assert!(diff < 1e-12 * p.max_abs(), "{diff}");
        }
    }
}
