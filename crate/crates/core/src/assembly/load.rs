use rayon::prelude::*;

use crate::fem::ReferenceBasis;
use crate::geometry::{EdgeKind, Mesh, Point};
use crate::waves::IncidentField;

use super::{DofMap, EdgeQuadrature};

struct InterfacePoint {
    x: Point,
    weight: f64,
    normal: [f64; 2],
    /// (global DOF of component 0, component 1 offset) and value per function.
    solid: (usize, Vec<f64>),
    fluid: (usize, Vec<f64>),
}

/// Precomputed interface quadrature for repeated load evaluation.
pub struct LoadAssembler {
    n_local: usize,
    size: usize,
    points: Vec<InterfacePoint>,
}

impl LoadAssembler {
    pub fn new(mesh: &Mesh, basis: &ReferenceBasis, dofs: &DofMap) -> Self {
        let mut points = Vec::new();
        for (e, _) in mesh.edges_of_kind(EdgeKind::Interface) {
            let q = EdgeQuadrature::new(mesh, basis, e);
            for k in 0..q.len() {
                points.push(InterfacePoint {
                    x: q.points[k],
                    weight: q.weights[k],
                    normal: q.normal,
                    solid: (dofs.index(q.sides[0].element, 0, 0), q.sides[0].values[k].clone()),
                    fluid: (dofs.index(q.sides[1].element, 0, 0), q.sides[1].values[k].clone()),
                });
            }
        }
        LoadAssembler { n_local: basis.n_local, size: dofs.size, points }
    }

    /// Fluid rows get ∫_Γ (∇φⁱ·n) ψ, elastic rows -∫_Γ φⁱ_t n·v.
    pub fn assemble_into(&self, wave: &dyn IncidentField, t: f64, f: &mut [f64]) {
        assert_eq!(f.len(), self.size);
        f.iter_mut().for_each(|v| *v = 0.0);
        let n = self.n_local;
        let data: Vec<(f64, f64)> = self
            .points
            .par_iter()
            .with_min_len(64)
            .map(|p| {
                let g = wave.gradient(p.x, t);
                (g[0] * p.normal[0] + g[1] * p.normal[1], wave.time_derivative(p.x, t))
            })
            .collect();
        // Sequential scatter in a fixed order keeps the sum deterministic.
        for (p, (dn, dt)) in self.points.iter().zip(data) {
            let (s0, ref sv) = p.solid;
            let (f0, ref fv) = p.fluid;
            for i in 0..n {
                f[f0 + i] += p.weight * dn * fv[i];
                f[s0 + i] -= p.weight * dt * p.normal[0] * sv[i];
                f[s0 + n + i] -= p.weight * dt * p.normal[1] * sv[i];
            }
        }
    }

    pub fn assemble(&self, wave: &dyn IncidentField, t: f64) -> Vec<f64> {
        let mut f = vec![0.0; self.size];
        self.assemble_into(wave, t, &mut f);
        f
    }
}

pub fn assemble_load(
    mesh: &Mesh,
    basis: &ReferenceBasis,
    dofs: &DofMap,
    wave: &dyn IncidentField,
    t: f64,
) -> Vec<f64> {
    LoadAssembler::new(mesh, basis, dofs).assemble(wave, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{parse_msh, CurvedBoundary};
    use crate::waves::IncidentWave;

    struct ConstantRate;
    impl IncidentField for ConstantRate {
        fn value(&self, _: Point, t: f64) -> f64 {
            t
        }
        fn time_derivative(&self, _: Point, _: f64) -> f64 {
            1.0
        }
        fn gradient(&self, _: Point, _: f64) -> [f64; 2] {
            [0.0, 0.0]
        }
    }

    const ENCLOSED: &str = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n6\n1 0 0 0\n2 2 0 0\n3 1 2 0\n4 1 -1 0\n5 2.5 1.5 0\n6 -0.5 1.5 0\n$EndNodes\n$Elements\n4\n1 2 2 1 1 1 2 3\n2 2 2 2 2 1 4 2\n3 2 2 2 2 2 5 3\n4 2 2 2 2 3 6 1\n$EndElements\n";

    #[test]
    fn zero_wave_gives_zero_load() {
        let mesh = parse_msh(ENCLOSED, CurvedBoundary::default()).unwrap();
        let basis = ReferenceBasis::new(2).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        assert!(assemble_load(&mesh, &basis, &dofs, &IncidentWave::Zero, 0.3).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_rate_gives_half_length_normals() {
        let mesh = parse_msh(ENCLOSED, CurvedBoundary::default()).unwrap();
        let basis = ReferenceBasis::new(1).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        let f = assemble_load(&mesh, &basis, &dofs, &ConstantRate, 0.0);
        // Element 0 is elastic; each vertex touches two interface edges.
        let mut expected = [[0.0; 2]; 3];
        for (_, e) in mesh.edges_of_kind(EdgeKind::Interface) {
            let tri = &mesh.triangles[0].vertices;
            for v in e.vertices {
                let i = tri.iter().position(|&x| x == v).unwrap();
                for a in 0..2 {
                    expected[i][a] -= e.length / 2.0 * e.normal[a];
                }
            }
        }
        for i in 0..3 {
            for a in 0..2 {
                assert!((f[dofs.index(0, a, i)] - expected[i][a]).abs() < 1e-14);
            }
        }
        assert!(f[dofs.elastic_size..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn plane_wave_at_time_zero() {
        let mesh = parse_msh(ENCLOSED, CurvedBoundary::default()).unwrap();
        let basis = ReferenceBasis::new(1).unwrap();
        let dofs = DofMap::new(&mesh, &basis);
        let w = IncidentWave::plane([1.0, 0.0]).unwrap();
        let f = assemble_load(&mesh, &basis, &dofs, &w, 0.0);
        assert!(f[..dofs.elastic_size].iter().all(|&v| v == 0.0));
        // Fluid side: compare with a fine trapezoid integration of -sin(x) n_x φ.
        for (e, edge) in mesh.edges_of_kind(EdgeKind::Interface) {
            let q = EdgeQuadrature::new(&mesh, &basis, e);
            let fluid = q.sides[1].element;
            let map = crate::fem::ElementMap::of(&mesh, fluid);
            let a = mesh.vertices[edge.vertices[0]];
            let b = mesh.vertices[edge.vertices[1]];
            for j in 0..3 {
                let m = 20000;
                let mut s = 0.0;
                for k in 0..m {
                    let t = (k as f64 + 0.5) / m as f64;
                    let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                    s += -x[0].sin() * edge.normal[0] * basis.eval(map.to_reference(x))[j];
                }
                s *= edge.length / m as f64;
                // Only this edge touches that fluid element in the interface set.
                // Three Gauss points on an edge of length ~2.2 leave ~1e-4.
                assert!((f[dofs.index(fluid, 0, j)] - s).abs() < 1e-3);
            }
        }
    }
}
