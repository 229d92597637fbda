use crate::geometry::{Mesh, Point, Subdomain};

use super::basis::ReferenceBasis;
use super::map::ElementMap;

/// Element-wise L² projection of `f` onto P_k on every element tagged `tag`.
///
/// Returns `num_elements * n_local` coefficients laid out element by element;
/// elements of the other subdomain are left at zero.
pub fn l2_project<F>(mesh: &Mesh, basis: &ReferenceBasis, f: F, tag: Subdomain) -> Vec<f64>
where
    F: Fn(Point) -> f64,
{
    let n = basis.n_local;
    let mut out = vec![0.0; mesh.num_elements() * n];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if tri.subdomain != tag {
            continue;
        }
        let c = project_element(mesh, basis, t, &f);
        out[t * n..(t + 1) * n].copy_from_slice(&c);
    }
    out
}

/// Local projection on a single element: M_ref c = ∫_ref f φ (the Jacobian cancels).
pub fn project_element<F>(mesh: &Mesh, basis: &ReferenceBasis, t: usize, f: &F) -> Vec<f64>
where
    F: Fn(Point) -> f64,
{
    let map = ElementMap::of(mesh, t);
    let n = basis.n_local;
    let mut rhs = nalgebra::DVector::zeros(n);
    for (q, &xi) in basis.volume_rule.points.iter().enumerate() {
        let fx = f(map.to_physical(xi)) * basis.volume_rule.weights[q];
        for j in 0..n {
            rhs[j] += fx * basis.values[q][j];
        }
    }
    (&basis.mass_inv * rhs).iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_annulus_mesh, CurvedBoundary, Triangle};
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn zero_field_projects_to_zero() {
        let mesh = build_annulus_mesh(1.0, 2.0, 1, 8).unwrap();
        let basis = ReferenceBasis::new(2).unwrap();
        assert!(l2_project(&mesh, &basis, |_| 0.0, Subdomain::Fluid).iter().all(|&c| c == 0.0));
    }

    #[test]
    fn polynomials_are_reproduced() {
        let mesh = build_annulus_mesh(1.0, 2.0, 1, 8).unwrap();
        for k in 1..=4 {
            let basis = ReferenceBasis::new(k).unwrap();
            let f = |p: Point| (p[0] - 0.3 * p[1]).powi(k as i32) + 2.0 * p[1] - 1.0;
            let c = l2_project(&mesh, &basis, f, Subdomain::Elastic);
            for t in (0..mesh.num_elements()).filter(|&t| mesh.triangles[t].subdomain == Subdomain::Elastic) {
                let map = ElementMap::of(&mesh, t);
                let local = &c[t * basis.n_local..(t + 1) * basis.n_local];
                for (q, &xi) in basis.volume_rule.points.iter().enumerate() {
                    let v: f64 = basis.values[q].iter().zip(local).map(|(a, b)| a * b).sum();
                    assert!((v - f(map.to_physical(xi))).abs() < 1e-11);
                }
                // Projecting the evaluated field returns the same coefficients.
                let again = project_element(&mesh, &basis, t, &|p: Point| {
                    basis.eval_combination(local, map.to_reference(p))
                });
                for (a, b) in again.iter().zip(local) {
                    assert!((a - b).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn sine_matches_dense_least_squares() {
        // Projection minimizes ∫(f - p)²; least squares on many uniformly spread
        // samples approximates the same minimizer.
        let vertices = vec![[0.0, 0.0], [1.2, 0.1], [0.3, 0.9]];
        let tri = Triangle { vertices: [0, 1, 2], subdomain: Subdomain::Fluid };
        let mesh = Mesh::new(vertices, vec![tri], CurvedBoundary::default()).unwrap();
        let basis = ReferenceBasis::new(1).unwrap();
        let c = l2_project(&mesh, &basis, |p| p[0].sin(), Subdomain::Fluid);

        let map = ElementMap::of(&mesh, 0);
        let m = 100;
        let mut samples = Vec::new();
        // Centroids of a uniform sub-triangulation are equally weighted.
        let n = 10;
        for j in 0..n {
            for i in 0..n - j {
                samples.push([(i as f64 + 1.0 / 3.0) / n as f64, (j as f64 + 1.0 / 3.0) / n as f64]);
                if i + j + 1 < n {
                    samples.push([(i as f64 + 2.0 / 3.0) / n as f64, (j as f64 + 2.0 / 3.0) / n as f64]);
                }
            }
        }
        assert_eq!(samples.len(), m);
        let a = DMatrix::from_fn(m, 3, |r, j| basis.eval(samples[r])[j]);
        let b = DVector::from_fn(m, |r, _| map.to_physical(samples[r])[0].sin());
        let ls = (a.transpose() * &a).cholesky().unwrap().solve(&(a.transpose() * b));
        for j in 0..3 {
            assert!((ls[j] - c[j]).abs() < 2e-3, "{} vs {}", ls[j], c[j]);
        }
    }
}
