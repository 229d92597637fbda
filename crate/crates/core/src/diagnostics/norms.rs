use rayon::prelude::*;

use crate::assembly::{DofMap, ElasticJump, PhysicalParams};
use crate::fem::{ElementMap, ReferenceBasis};
use crate::geometry::{EdgeKind, Mesh};

use super::{DiscreteField, LocalValue};

/// Which jump terms enter the DG energy norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormOptions {
    pub jump: ElasticJump,
    /// Include the one-sided traces on interface edges (elastic trace of u,
    /// fluid trace of φ). Without them the norm is a seminorm whose kernel
    /// contains rigid motions and constants.
    pub interface_traces: bool,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions { jump: ElasticJump::Full, interface_traces: true }
    }
}

impl NormOptions {
    pub fn seminorm(jump: ElasticJump) -> Self {
        NormOptions { jump, interface_traces: false }
    }

    pub(crate) fn wants(&self, kind: EdgeKind) -> bool {
        match kind {
            EdgeKind::InteriorElastic | EdgeKind::InteriorFluid => true,
            EdgeKind::Interface => self.interface_traces,
            EdgeKind::Artificial | EdgeKind::FreeElastic => false,
        }
    }
}

/// A norm split into its elastic and fluid parts.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FieldNorms {
    pub elastic: f64,
    pub fluid: f64,
}

impl FieldNorms {
    pub fn combined(&self) -> f64 {
        self.elastic.hypot(self.fluid)
    }

    pub(crate) fn from_squares(sq: [f64; 2]) -> Self {
        FieldNorms { elastic: sq[0].max(0.0).sqrt(), fluid: sq[1].max(0.0).sqrt() }
    }
}

/// Squared jump integrand on an edge of the given kind, split (elastic, fluid).
/// `sides[0]` is the first adjacent element (the elastic one on interfaces).
pub(crate) fn jump_density(kind: EdgeKind, jump: ElasticJump, normal: [f64; 2], sides: &[LocalValue]) -> [f64; 2] {
    match kind {
        EdgeKind::InteriorElastic => {
            let d = [sides[0].value[0] - sides[1].value[0], sides[0].value[1] - sides[1].value[1]];
            let e = match jump {
                ElasticJump::Full => d[0] * d[0] + d[1] * d[1],
                ElasticJump::NormalComponent => {
                    let s = d[0] * normal[0] + d[1] * normal[1];
                    s * s
                }
            };
            [e, 0.0]
        }
        EdgeKind::InteriorFluid => {
            let d = sides[0].value[0] - sides[1].value[0];
            [0.0, d * d]
        }
        EdgeKind::Interface => {
            let u = sides[0].value;
            let phi = sides[1].value[0];
            [u[0] * u[0] + u[1] * u[1], phi * phi]
        }
        EdgeKind::Artificial | EdgeKind::FreeElastic => [0.0, 0.0],
    }
}

/// Squared (energy, L²) contributions of one element, split (elastic, fluid).
fn element_squares(field: &DiscreteField, params: &PhysicalParams, t: usize) -> ([f64; 2], [f64; 2]) {
    let basis = field.basis;
    let map = ElementMap::of(field.mesh, t);
    let slot = usize::from(!field.dofs.is_elastic(t));
    let (mut energy, mut l2) = ([0.0; 2], [0.0; 2]);
    for (q, w) in basis.volume_rule.weights.iter().enumerate() {
        let v = field.combine(t, &map, &basis.values[q], &basis.grads[q]);
        let w = w * map.det;
        energy[slot] += w * v.energy_density(params);
        l2[slot] += w * v.value_squared();
    }
    (energy, l2)
}

fn edge_squares(field: &DiscreteField, e: usize, opts: &NormOptions) -> [f64; 2] {
    let mesh = field.mesh;
    let edge = &mesh.edges[e];
    if !opts.wants(edge.kind) {
        return [0.0; 2];
    }
    let rule = &field.basis.edge_rule;
    let mut out = [0.0; 2];
    for (s, w) in rule.points.iter().zip(&rule.weights) {
        let x = edge.point(mesh, *s);
        let sides: Vec<LocalValue> = (0..edge.sides).map(|k| field.eval(edge.elements[k], x)).collect();
        let d = jump_density(edge.kind, opts.jump, edge.normal, &sides);
        out[0] += w * edge.length * d[0];
        out[1] += w * edge.length * d[1];
    }
    out
}

fn add(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] + b[0], a[1] + b[1]]
}

/// DG energy norm split into its elastic and fluid parts. Jump terms carry
/// the weight 1/h with h the mesh size.
pub fn dg_energy_norms(
    mesh: &Mesh,
    basis: &ReferenceBasis,
    dofs: &DofMap,
    params: &PhysicalParams,
    u: &[f64],
    opts: &NormOptions,
) -> FieldNorms {
    let field = DiscreteField::new(mesh, basis, dofs, u);
    let volume = (0..mesh.num_elements())
        .into_par_iter()
        .map(|t| element_squares(&field, params, t).0)
        .collect::<Vec<_>>()
        .into_iter()
        .fold([0.0; 2], add);
    let jumps = (0..mesh.edges.len())
        .into_par_iter()
        .map(|e| edge_squares(&field, e, opts))
        .collect::<Vec<_>>()
        .into_iter()
        .fold([0.0; 2], add);
    let h = mesh.mesh_size;
    FieldNorms::from_squares([volume[0] + jumps[0] / h, volume[1] + jumps[1] / h])
}

/// Combined DG energy norm with the full vector jump and interface traces.
pub fn dg_energy_norm(mesh: &Mesh, basis: &ReferenceBasis, dofs: &DofMap, params: &PhysicalParams, u: &[f64]) -> f64 {
    dg_energy_norms(mesh, basis, dofs, params, u, &NormOptions::default()).combined()
}

/// The DG energy norm without interface traces.
pub fn dg_energy_seminorm(
    mesh: &Mesh,
    basis: &ReferenceBasis,
    dofs: &DofMap,
    params: &PhysicalParams,
    u: &[f64],
    jump: ElasticJump,
) -> f64 {
    dg_energy_norms(mesh, basis, dofs, params, u, &NormOptions::seminorm(jump)).combined()
}

pub fn l2_norms(mesh: &Mesh, basis: &ReferenceBasis, dofs: &DofMap, u: &[f64]) -> FieldNorms {
    let field = DiscreteField::new(mesh, basis, dofs, u);
    let params = PhysicalParams::default();
    let sq = (0..mesh.num_elements())
        .into_par_iter()
        .map(|t| element_squares(&field, &params, t).1)
        .collect::<Vec<_>>()
        .into_iter()
        .fold([0.0; 2], add);
    FieldNorms::from_squares(sq)
}

pub fn l2_norm(mesh: &Mesh, basis: &ReferenceBasis, dofs: &DofMap, u: &[f64]) -> f64 {
    l2_norms(mesh, basis, dofs, u).combined()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_jump_gram, assemble_stiffness_terms, PenaltyParams, StiffnessTerms};
    use crate::fem::make_basis;
    use crate::geometry::{build_annulus_mesh, CurvedBoundary, Subdomain, Triangle};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn annulus() -> Mesh {
        build_annulus_mesh(1.0, 2.0, 2, 12).unwrap()
    }

    fn random_vector(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn zero_field_has_zero_norms() {
        let mesh = annulus();
        let basis = make_basis(2).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        let u = vec![0.0; dofs.size];
        let p = PhysicalParams::default();
        assert_eq!(dg_energy_norm(&mesh, &basis, &dofs, &p, &u), 0.0);
        assert_eq!(l2_norm(&mesh, &basis, &dofs, &u), 0.0);
    }

    #[test]
    fn unit_potential_l2_norm_is_root_area() {
        let mesh = annulus();
        let basis = make_basis(1).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        let u = dofs.project(&mesh, &basis, |_| [0.0; 2], |_| 1.0);
        let area = mesh.subdomain_area(Subdomain::Fluid);
        assert!((l2_norm(&mesh, &basis, &dofs, &u) - area.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn l2_norm_matches_gram_matrix() {
        let mesh = annulus();
        let basis = make_basis(2).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        let u = random_vector(dofs.size, 4);
        // Unit-coefficient Gram matrix is the mass matrix with unit densities.
        let m = crate::assembly::assemble_mass(&mesh, &basis, &dofs, &PhysicalParams::default());
        let oracle = m.bilinear(&u, &u).sqrt();
        let got = l2_norm(&mesh, &basis, &dofs, &u);
        assert!((got - oracle).abs() <= 1e-12 * oracle);
    }

    #[test]
    fn norm_squared_matches_matrix_forms() {
        let mesh = annulus();
        let params = PhysicalParams { lambda: 2.0, mu: 0.7, rho1: 1.3, ..Default::default() };
        for jump in [ElasticJump::Full, ElasticJump::NormalComponent] {
            for interface in [true, false] {
                let basis = make_basis(2).unwrap();
                let dofs = DofMap::new(&mesh, &basis);
                let u = random_vector(dofs.size, 9);
                let pen = PenaltyParams { elastic_jump: jump, ..Default::default() };
                let vol = assemble_stiffness_terms(&mesh, &basis, &dofs, &params, &pen, StiffnessTerms::VOLUME);
                let gram = assemble_jump_gram(&mesh, &basis, &dofs, jump, interface);
                let oracle = vol.bilinear(&u, &u) + gram.bilinear(&u, &u) / mesh.mesh_size;
                let opts = NormOptions { jump, interface_traces: interface };
                let got = dg_energy_norms(&mesh, &basis, &dofs, &params, &u, &opts).combined().powi(2);
                assert!((got - oracle).abs() <= 1e-11 * oracle, "{jump:?} {interface}: {got} vs {oracle}");
            }
        }
    }

    #[test]
    fn linear_potential_on_two_fluid_triangles() {
        // φ = x₁ on the unit square split along the diagonal. Interior jumps
        // vanish; without interface edges the norm is the gradient part alone.
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let triangles = vec![
            Triangle { vertices: [0, 1, 2], subdomain: Subdomain::Fluid },
            Triangle { vertices: [0, 2, 3], subdomain: Subdomain::Fluid },
        ];
        let mesh = Mesh::new(vertices, triangles, CurvedBoundary::default()).unwrap();
        let basis = make_basis(1).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        let u = dofs.project(&mesh, &basis, |_| [0.0; 2], |x| x[0]);
        let n = dg_energy_norm(&mesh, &basis, &dofs, &PhysicalParams::default(), &u);
        assert!((n * n - 1.0).abs() < 1e-12, "{}", n * n);
    }

    #[test]
    fn linear_potential_on_coupled_mesh_counts_interface_traces() {
        // Elastic triangle enclosed by three fluid triangles; φ = x₁ on the
        // fluid part, u = 0. The interface contribution is (1/h)∫_Γh x₁².
        let vertices = vec![[0.0, 0.0], [2.0, 0.0], [1.0, 2.0], [1.0, -1.0], [2.5, 1.5], [-0.5, 1.5]];
        let triangles = vec![
            Triangle { vertices: [0, 1, 2], subdomain: Subdomain::Elastic },
            Triangle { vertices: [0, 3, 1], subdomain: Subdomain::Fluid },
            Triangle { vertices: [1, 4, 2], subdomain: Subdomain::Fluid },
            Triangle { vertices: [2, 5, 0], subdomain: Subdomain::Fluid },
        ];
        let mesh = Mesh::new(vertices.clone(), triangles, CurvedBoundary::default()).unwrap();
        let basis = make_basis(1).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        let u = dofs.project(&mesh, &basis, |_| [0.0; 2], |x| x[0]);
        let area = mesh.subdomain_area(Subdomain::Fluid);
        // ∫ x₁² over a segment from a to b is |b - a| (a² + ab + b²) / 3.
        let seg = |a: [f64; 2], b: [f64; 2]| {
            let len = (b[0] - a[0]).hypot(b[1] - a[1]);
            len * (a[0] * a[0] + a[0] * b[0] + b[0] * b[0]) / 3.0
        };
        let gamma = seg(vertices[0], vertices[1]) + seg(vertices[1], vertices[2]) + seg(vertices[2], vertices[0]);
        let expected = area + gamma / mesh.mesh_size;
        let n = dg_energy_norm(&mesh, &basis, &dofs, &PhysicalParams::default(), &u);
        assert!((n * n - expected).abs() < 1e-12 * expected, "{} vs {expected}", n * n);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn homogeneity_and_triangle_inequality(seed in 0u64..1000, scale in -5.0f64..5.0) {
            let mesh = build_annulus_mesh(1.0, 2.0, 1, 8).unwrap();
            let basis = make_basis(1).unwrap();
            let dofs = DofMap::new(&mesh, &basis);
            let p = PhysicalParams::default();
            let u = random_vector(dofs.size, seed);
            let v = random_vector(dofs.size, seed + 7);
            let nu = dg_energy_norm(&mesh, &basis, &dofs, &p, &u);
            let su: Vec<f64> = u.iter().map(|x| scale * x).collect();
            let ns = dg_energy_norm(&mesh, &basis, &dofs, &p, &su);
            prop_assert!((ns - scale.abs() * nu).abs() <= 1e-12 * nu.max(1.0));
            let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
            let nv = dg_energy_norm(&mesh, &basis, &dofs, &p, &v);
            prop_assert!(dg_energy_norm(&mesh, &basis, &dofs, &p, &w) <= nu + nv + 1e-12);
            let l = l2_norm(&mesh, &basis, &dofs, &w);
            prop_assert!(l <= l2_norm(&mesh, &basis, &dofs, &u) + l2_norm(&mesh, &basis, &dofs, &v) + 1e-12);
        }
    }
}
