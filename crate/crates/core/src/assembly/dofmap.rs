use std::ops::Range;

use crate::fem::{l2_project, ReferenceBasis};
use crate::geometry::{Mesh, Point, Subdomain};

/// Global numbering of element-local coefficients.
///
/// Elastic elements come first (two displacement components, each a block of
/// `n_local` coefficients), then fluid elements (one potential block). Within
/// each subdomain elements keep their mesh order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    pub n_local: usize,
    offsets: Vec<usize>,
    components: Vec<usize>,
    /// First fluid DOF; elastic DOFs are `0..elastic_size`.
    pub elastic_size: usize,
    pub size: usize,
}

impl DofMap {
    pub fn new(mesh: &Mesh, basis: &ReferenceBasis) -> Self {
        let n_local = basis.n_local;
        let mut offsets = vec![0; mesh.num_elements()];
        let mut components = vec![0; mesh.num_elements()];
        let mut next = 0;
        for tag in [Subdomain::Elastic, Subdomain::Fluid] {
            let comps = if tag == Subdomain::Elastic { 2 } else { 1 };
            for (t, tri) in mesh.triangles.iter().enumerate() {
                if tri.subdomain == tag {
                    offsets[t] = next;
                    components[t] = comps;
                    next += comps * n_local;
                }
            }
        }
        let elastic_size = 2 * n_local * mesh.count_elements(Subdomain::Elastic);
        DofMap { n_local, offsets, components, elastic_size, size: next }
    }

    pub fn num_elements(&self) -> usize {
        self.offsets.len()
    }

    pub fn range(&self, t: usize) -> Range<usize> {
        self.offsets[t]..self.offsets[t] + self.components[t] * self.n_local
    }

    /// Global index of coefficient `i` of component `comp` on element `t`.
    pub fn index(&self, t: usize, comp: usize, i: usize) -> usize {
        debug_assert!(comp < self.components[t] && i < self.n_local);
        self.offsets[t] + comp * self.n_local + i
    }

    pub fn components(&self, t: usize) -> usize {
        self.components[t]
    }

    pub fn is_elastic(&self, t: usize) -> bool {
        self.components[t] == 2
    }

    pub fn is_fluid_dof(&self, dof: usize) -> bool {
        dof >= self.elastic_size
    }

    /// Scatter per-element coefficients (as produced by `l2_project`) into
    /// displacement component `comp` of every elastic element.
    pub fn scatter_elastic(&self, local: &[f64], comp: usize, out: &mut [f64]) {
        assert!(comp < 2);
        for t in (0..self.num_elements()).filter(|&t| self.is_elastic(t)) {
            for i in 0..self.n_local {
                out[self.index(t, comp, i)] = local[t * self.n_local + i];
            }
        }
    }

    /// Scatter per-element coefficients into the potential of every fluid element.
    pub fn scatter_fluid(&self, local: &[f64], out: &mut [f64]) {
        for t in (0..self.num_elements()).filter(|&t| !self.is_elastic(t)) {
            for i in 0..self.n_local {
                out[self.index(t, 0, i)] = local[t * self.n_local + i];
            }
        }
    }

    /// Global vector holding the element-wise L² projections of a
    /// displacement field on elastic elements and a potential on fluid ones.
    pub fn project<U, P>(&self, mesh: &Mesh, basis: &ReferenceBasis, u: U, phi: P) -> Vec<f64>
    where
        U: Fn(Point) -> [f64; 2],
        P: Fn(Point) -> f64,
    {
        let mut out = vec![0.0; self.size];
        for comp in 0..2 {
            let local = l2_project(mesh, basis, |x| u(x)[comp], Subdomain::Elastic);
            self.scatter_elastic(&local, comp, &mut out);
        }
        self.scatter_fluid(&l2_project(mesh, basis, phi, Subdomain::Fluid), &mut out);
        out
    }

    /// Coefficients of component `comp` on element `t`.
    pub fn local<'a>(&self, u: &'a [f64], t: usize, comp: usize) -> &'a [f64] {
        let start = self.index(t, comp, 0);
        &u[start..start + self.n_local]
    }
}
