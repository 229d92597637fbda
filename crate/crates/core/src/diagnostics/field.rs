use crate::assembly::{DofMap, PhysicalParams};
use crate::fem::{ElementMap, ReferenceBasis};
use crate::geometry::Mesh;

/// A global coefficient vector together with the discretization it lives on.
#[derive(Clone, Copy)]
pub struct DiscreteField<'a> {
    pub mesh: &'a Mesh,
    pub basis: &'a ReferenceBasis,
    pub dofs: &'a DofMap,
    pub coeffs: &'a [f64],
}

/// Values and physical gradients of all components at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LocalValue {
    pub components: usize,
    pub value: [f64; 2],
    pub grad: [[f64; 2]; 2],
}

impl LocalValue {
    pub fn minus(&self, other: &LocalValue) -> LocalValue {
        let mut out = *self;
        for c in 0..2 {
            out.value[c] -= other.value[c];
            for d in 0..2 {
                out.grad[c][d] -= other.grad[c][d];
            }
        }
        out
    }

    /// (2μ/ρ₁) ε:ε + (λ/ρ₁)(∇·u)² for displacements, |∇φ|² for potentials.
    pub fn energy_density(&self, params: &PhysicalParams) -> f64 {
        let g = &self.grad;
        if self.components == 2 {
            let div = g[0][0] + g[1][1];
            let off = 0.5 * (g[0][1] + g[1][0]);
            let eps2 = g[0][0] * g[0][0] + g[1][1] * g[1][1] + 2.0 * off * off;
            2.0 * params.mu / params.rho1 * eps2 + params.lambda / params.rho1 * div * div
        } else {
            g[0][0] * g[0][0] + g[0][1] * g[0][1]
        }
    }

    pub fn value_squared(&self) -> f64 {
        (0..self.components).map(|c| self.value[c] * self.value[c]).sum()
    }
}

impl<'a> DiscreteField<'a> {
    pub fn new(mesh: &'a Mesh, basis: &'a ReferenceBasis, dofs: &'a DofMap, coeffs: &'a [f64]) -> Self {
        assert_eq!(coeffs.len(), dofs.size);
        DiscreteField { mesh, basis, dofs, coeffs }
    }

    /// Evaluate the polynomial of element `t` at physical point `x`
    /// (extrapolating if `x` lies outside the element).
    pub fn eval(&self, t: usize, x: [f64; 2]) -> LocalValue {
        let map = ElementMap::of(self.mesh, t);
        let xi = map.to_reference(x);
        let vals = self.basis.eval(xi);
        let grads = self.basis.eval_grad(xi);
        self.combine(t, &map, &vals, &grads)
    }

    /// Combine tabulated reference values and gradients on element `t`.
    pub fn combine(&self, t: usize, map: &ElementMap, vals: &[f64], grads: &[[f64; 2]]) -> LocalValue {
        let comps = self.dofs.components(t);
        let mut out = LocalValue { components: comps, ..Default::default() };
        for c in 0..comps {
            let local = self.dofs.local(self.coeffs, t, c);
            let mut g = [0.0; 2];
            for j in 0..local.len() {
                out.value[c] += local[j] * vals[j];
                g[0] += local[j] * grads[j][0];
                g[1] += local[j] * grads[j][1];
            }
            out.grad[c] = map.map_gradient(g);
        }
        out
    }
}
