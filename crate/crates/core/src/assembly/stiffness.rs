use rayon::prelude::*;

use crate::fem::{ElementMap, ReferenceBasis};
use crate::geometry::{EdgeKind, Mesh};
use crate::sparse::{CsrMatrix, Triplet};

use super::{DofMap, EdgeQuadrature, ElasticJump, PenaltyParams, PhysicalParams};

/// Which parts of the stiffness form to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StiffnessTerms {
    pub volume: bool,
    pub consistency: bool,
    pub penalty: bool,
}

impl StiffnessTerms {
    pub const ALL: StiffnessTerms = StiffnessTerms { volume: true, consistency: true, penalty: true };
    pub const VOLUME: StiffnessTerms = StiffnessTerms { volume: true, consistency: false, penalty: false };
    pub const PENALTY: StiffnessTerms = StiffnessTerms { volume: false, consistency: false, penalty: true };
}

pub fn assemble_stiffness(
    mesh: &Mesh,
    basis: &ReferenceBasis,
    dofs: &DofMap,
    params: &PhysicalParams,
    penalty: &PenaltyParams,
) -> CsrMatrix {
    assemble_stiffness_terms(mesh, basis, dofs, params, penalty, StiffnessTerms::ALL)
}

pub fn assemble_stiffness_terms(
    mesh: &Mesh,
    basis: &ReferenceBasis,
    dofs: &DofMap,
    params: &PhysicalParams,
    penalty: &PenaltyParams,
    terms: StiffnessTerms,
) -> CsrMatrix {
    let mut triplets: Vec<Triplet> = Vec::new();
    if terms.volume {
        triplets.par_extend(
            (0..mesh.num_elements())
                .into_par_iter()
                .flat_map_iter(|t| volume_block(mesh, basis, dofs, params, t)),
        );
    }
    if terms.consistency || terms.penalty {
        triplets.par_extend((0..mesh.edges.len()).into_par_iter().flat_map_iter(|e| {
            match mesh.edges[e].kind {
                EdgeKind::InteriorElastic => {
                    elastic_edge_block(mesh, basis, dofs, params, penalty, terms, e)
                }
                EdgeKind::InteriorFluid => fluid_edge_block(mesh, basis, dofs, penalty, terms, e),
                _ => Vec::new(),
            }
        }));
    }
    CsrMatrix::from_triplets(dofs.size, dofs.size, triplets)
}

fn volume_block(
    mesh: &Mesh,
    basis: &ReferenceBasis,
    dofs: &DofMap,
    params: &PhysicalParams,
    t: usize,
) -> Vec<Triplet> {
    let map = ElementMap::of(mesh, t);
    let n = basis.n_local;
    let comps = dofs.components(t);
    let mut local = vec![0.0; (comps * n) * (comps * n)];
    let width = comps * n;
    let (lam, mu) = (params.lambda / params.rho1, params.mu / params.rho1);
    for (q, w) in basis.volume_rule.weights.iter().enumerate() {
        let w = w * map.det;
        let g: Vec<[f64; 2]> = basis.grads[q].iter().map(|&g| map.map_gradient(g)).collect();
        if comps == 1 {
            for i in 0..n {
                for j in 0..n {
                    local[i * width + j] += w * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                }
            }
        } else {
            for a in 0..2 {
                for i in 0..n {
                    for b in 0..2 {
                        for j in 0..n {
                            let dot = if a == b { g[i][0] * g[j][0] + g[i][1] * g[j][1] } else { 0.0 };
                            let v = lam * g[i][a] * g[j][b] + mu * (dot + g[i][b] * g[j][a]);
                            local[(a * n + i) * width + b * n + j] += w * v;
                        }
                    }
                }
            }
        }
    }
    let first = dofs.index(t, 0, 0);
    let mut out = Vec::with_capacity(local.len());
    for r in 0..width {
        for c in 0..width {
            out.push((first + r, first + c, local[r * width + c]));
        }
    }
    out
}

/// σ(φ e_b) n / ρ₁ for a scalar basis function with physical gradient `g`.
pub(crate) fn traction(params: &PhysicalParams, g: [f64; 2], b: usize, n: [f64; 2]) -> [f64; 2] {
    let (lam, mu) = (params.lambda / params.rho1, params.mu / params.rho1);
    let gn = g[0] * n[0] + g[1] * n[1];
    let mut t = [lam * g[b] * n[0] + mu * g[0] * n[b], lam * g[b] * n[1] + mu * g[1] * n[b]];
    t[b] += mu * gn;
    t
}

const SIGN: [f64; 2] = [1.0, -1.0];

fn elastic_edge_block(
    mesh: &Mesh,
    basis: &ReferenceBasis,
    dofs: &DofMap,
    params: &PhysicalParams,
    penalty: &PenaltyParams,
    terms: StiffnessTerms,
    e: usize,
) -> Vec<Triplet> {
    let q = EdgeQuadrature::new(mesh, basis, e);
    let n = basis.n_local;
    let nrm = q.normal;
    let pen = if terms.penalty { penalty.weight(q.length) } else { 0.0 };
    let cons = if terms.consistency { 1.0 } else { 0.0 };
    let normal_only = penalty.elastic_jump == ElasticJump::NormalComponent;
    // Rows/columns: side s, component a, function i -> (s * 2 + a) * n + i.
    let width = 4 * n;
    let mut local = vec![0.0; width * width];
    for k in 0..q.len() {
        let w = q.weights[k];
        // tr[s][(b, j)] = traction of trial (j, b) on side s.
        let tr: Vec<Vec<[f64; 2]>> = (0..2)
            .map(|s| {
                (0..2)
                    .flat_map(|b| (0..n).map(move |j| (b, j)))
                    .map(|(b, j)| traction(params, q.sides[s].grads[k][j], b, nrm))
                    .collect()
            })
            .collect();
        for s in 0..2 {
            let phi_s = &q.sides[s].values[k];
            for a in 0..2 {
                for i in 0..n {
                    let row = (s * 2 + a) * n + i;
                    for sp in 0..2 {
                        let phi_sp = &q.sides[sp].values[k];
                        let ss = SIGN[s] * SIGN[sp];
                        for b in 0..2 {
                            for j in 0..n {
                                let t_trial = tr[sp][b * n + j];
                                let t_test = tr[s][a * n + i];
                                let v = if normal_only {
                                    let tn_trial = t_trial[0] * nrm[0] + t_trial[1] * nrm[1];
                                    let tn_test = t_test[0] * nrm[0] + t_test[1] * nrm[1];
                                    -0.5 * cons * tn_trial * SIGN[s] * phi_s[i] * nrm[a]
                                        - 0.5 * cons * tn_test * SIGN[sp] * phi_sp[j] * nrm[b]
                                        + pen * ss * phi_s[i] * phi_sp[j] * nrm[a] * nrm[b]
                                } else {
                                    let d = if a == b { 1.0 } else { 0.0 };
                                    -0.5 * cons * t_trial[a] * SIGN[s] * phi_s[i]
                                        - 0.5 * cons * t_test[b] * SIGN[sp] * phi_sp[j]
                                        + pen * ss * phi_s[i] * phi_sp[j] * d
                                };
                                local[row * width + (sp * 2 + b) * n + j] += w * v;
                            }
                        }
                    }
                }
            }
        }
    }
    let global = |r: usize| {
        let (s, rest) = (r / (2 * n), r % (2 * n));
        dofs.index(q.sides[s].element, rest / n, rest % n)
    };
    let mut out = Vec::with_capacity(local.len());
    for r in 0..width {
        for c in 0..width {
            out.push((global(r), global(c), local[r * width + c]));
        }
    }
    out
}

fn fluid_edge_block(
    mesh: &Mesh,
    basis: &ReferenceBasis,
    dofs: &DofMap,
    penalty: &PenaltyParams,
    terms: StiffnessTerms,
    e: usize,
) -> Vec<Triplet> {
    let q = EdgeQuadrature::new(mesh, basis, e);
    let n = basis.n_local;
    let nrm = q.normal;
    let pen = if terms.penalty { penalty.weight(q.length) } else { 0.0 };
    let cons = if terms.consistency { 1.0 } else { 0.0 };
    let width = 2 * n;
    let mut local = vec![0.0; width * width];
    for k in 0..q.len() {
        let w = q.weights[k];
        let dn: Vec<Vec<f64>> = (0..2)
            .map(|s| q.sides[s].grads[k].iter().map(|g| g[0] * nrm[0] + g[1] * nrm[1]).collect())
            .collect();
        for s in 0..2 {
            let phi_s = &q.sides[s].values[k];
            for i in 0..n {
                for sp in 0..2 {
                    let phi_sp = &q.sides[sp].values[k];
                    for j in 0..n {
                        let v = -0.5 * cons * dn[sp][j] * SIGN[s] * phi_s[i]
                            - 0.5 * cons * dn[s][i] * SIGN[sp] * phi_sp[j]
                            + pen * SIGN[s] * SIGN[sp] * phi_s[i] * phi_sp[j];
                        local[(s * n + i) * width + sp * n + j] += w * v;
                    }
                }
            }
        }
    }
    let global = |r: usize| dofs.index(q.sides[r / n].element, 0, r % n);
    let mut out = Vec::with_capacity(local.len());
    for r in 0..width {
        for c in 0..width {
            out.push((global(r), global(c), local[r * width + c]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::l2_project;
    use crate::geometry::{build_annulus_mesh, CurvedBoundary, Point, Subdomain, Triangle};

    fn setup(k: usize) -> (Mesh, ReferenceBasis, DofMap) {
        let mesh = build_annulus_mesh(1.0, 2.0, 2, 10).unwrap();
        let basis = ReferenceBasis::new(k).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        (mesh, basis, dofs)
    }

    fn interpolate(mesh: &Mesh, basis: &ReferenceBasis, dofs: &DofMap, u: &dyn Fn(Point) -> [f64; 2], phi: &dyn Fn(Point) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; dofs.size];
        for comp in 0..2 {
            let c = l2_project(mesh, basis, |p| u(p)[comp], Subdomain::Elastic);
            dofs.scatter_elastic(&c, comp, &mut out);
        }
        let c = l2_project(mesh, basis, phi, Subdomain::Fluid);
        dofs.scatter_fluid(&c, &mut out);
        out
    }

    #[test]
    fn constants_and_rigid_motions_are_in_the_kernel() {
        for k in 1..=3 {
            let (mesh, basis, dofs) = setup(k);
            let params = PhysicalParams { lambda: 2.0, mu: 0.7, ..Default::default() };
            for jump in [ElasticJump::Full, ElasticJump::NormalComponent] {
                let pen = PenaltyParams { elastic_jump: jump, ..Default::default() };
                let a = assemble_stiffness(&mesh, &basis, &dofs, &params, &pen);
                let fields: [(&dyn Fn(Point) -> [f64; 2], &dyn Fn(Point) -> f64); 3] = [
                    (&|_| [1.0, 0.0], &|_| 1.0),
                    (&|_| [0.0, 1.0], &|_| -2.0),
                    (&|p| [-p[1], p[0]], &|_| 0.0),
                ];
                for (u, phi) in fields {
                    let x = interpolate(&mesh, &basis, &dofs, u, phi);
                    let ax = a.matvec(&x);
                    let norm_x = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let worst = ax.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    assert!(worst <= 1e-10 * a.max_abs() * norm_x, "k={k}: {worst}");
                }
            }
        }
    }

    #[test]
    fn symmetric_with_no_elastic_fluid_coupling() {
        let (mesh, basis, dofs) = setup(2);
        let a = assemble_stiffness(&mesh, &basis, &dofs, &PhysicalParams::default(), &PenaltyParams::default());
        assert!(a.asymmetry() <= 1e-12 * a.max_abs());
        for (r, c, _) in a.triplets() {
            assert_eq!(dofs.is_fluid_dof(r), dofs.is_fluid_dof(c));
        }
    }

    #[test]
    fn continuous_fields_have_no_jump_contribution() {
        // For globally continuous polynomial fields all edge terms cancel except
        // consistency, which pairs a nonzero flux with a zero jump.
        let (mesh, basis, dofs) = setup(2);
        let x = interpolate(&mesh, &basis, &dofs, &|p| [p[0] * p[1], p[0] - p[1] * p[1]], &|p| p[0] * p[0] + p[1]);
        let pen = assemble_stiffness_terms(&mesh, &basis, &dofs, &PhysicalParams::default(), &PenaltyParams::default(), StiffnessTerms::PENALTY);
        let e = pen.bilinear(&x, &x);
        assert!(e.abs() < 1e-10, "{e}");
    }

    #[test]
    fn two_triangle_fluid_penalty_matches_dense_edge_mass() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let triangles = vec![
            Triangle { vertices: [0, 1, 2], subdomain: Subdomain::Fluid },
            Triangle { vertices: [0, 2, 3], subdomain: Subdomain::Fluid },
        ];
        let mesh = Mesh::new(vertices, triangles, CurvedBoundary::default()).unwrap();
        let basis = ReferenceBasis::new(1).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        let p = assemble_stiffness_terms(&mesh, &basis, &dofs, &PhysicalParams::default(), &PenaltyParams::default(), StiffnessTerms::PENALTY)
            .to_dense();
        // Shared edge (0,0)-(1,1). Linear traces along s: triangle 0 has
        // vertex 0 -> 1 - s, vertex 2 -> s; triangle 1 likewise for its 0 and 1.
        // Edge mass of linear hats: |e|/6 [[2,1],[1,2]].
        let len = 2f64.sqrt();
        let pen = 100.0 / len;
        let m = |a: usize, b: usize| len / 6.0 * if a == b { 2.0 } else { 1.0 };
        // (element, local index, position on the edge 0 = start, 1 = end)
        let nodes = [(0usize, 0usize, 0usize), (0, 2, 1), (1, 0, 0), (1, 1, 1)];
        let mut expected = nalgebra::DMatrix::<f64>::zeros(6, 6);
        for &(t1, i, pi) in &nodes {
            for &(t2, j, pj) in &nodes {
                let sign = if t1 == t2 { 1.0 } else { -1.0 };
                expected[(3 * t1 + i, 3 * t2 + j)] += pen * sign * m(pi, pj);
            }
        }
        assert!((p - expected).abs().max() < 1e-12);
    }
}
