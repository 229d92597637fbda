use crate::geometry::{Mesh, Point};

use super::FemError;

/// Affine map x = x0 + J ξ from the reference triangle onto a mesh element.
#[derive(Debug, Clone, Copy)]
pub struct ElementMap {
    pub origin: Point,
    /// Columns are v1 - v0 and v2 - v0.
    pub jacobian: [[f64; 2]; 2],
    pub det: f64,
    /// J^{-T}, maps reference gradients to physical ones.
    pub inv_t: [[f64; 2]; 2],
}

impl ElementMap {
    pub fn from_corners(c: [Point; 3]) -> Result<Self, FemError> {
        let j = [[c[1][0] - c[0][0], c[2][0] - c[0][0]], [c[1][1] - c[0][1], c[2][1] - c[0][1]]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let scale = j[0][0].abs() + j[0][1].abs() + j[1][0].abs() + j[1][1].abs();
        if !(det > 1e-14 * scale * scale) {
            return Err(FemError::DegenerateElement { det });
        }
        // J^{-1} = [[j11, -j01], [-j10, j00]] / det; transpose it.
        let inv_t = [[j[1][1] / det, -j[1][0] / det], [-j[0][1] / det, j[0][0] / det]];
        Ok(ElementMap { origin: c[0], jacobian: j, det, inv_t })
    }

    pub fn of(mesh: &Mesh, t: usize) -> Self {
        // Mesh construction already rejects degenerate triangles.
        Self::from_corners(mesh.corners(t)).expect("mesh elements have positive area")
    }

    pub fn to_physical(&self, xi: [f64; 2]) -> Point {
        let j = &self.jacobian;
        [
            self.origin[0] + j[0][0] * xi[0] + j[0][1] * xi[1],
            self.origin[1] + j[1][0] * xi[0] + j[1][1] * xi[1],
        ]
    }

    pub fn to_reference(&self, x: Point) -> [f64; 2] {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        // J^{-1} d, with J^{-1} the transpose of inv_t.
        [
            self.inv_t[0][0] * d[0] + self.inv_t[1][0] * d[1],
            self.inv_t[0][1] * d[0] + self.inv_t[1][1] * d[1],
        ]
    }

    /// J^{-T} ĝ.
    pub fn map_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_t[0][0] * g[0] + self.inv_t[0][1] * g[1],
            self.inv_t[1][0] * g[0] + self.inv_t[1][1] * g[1],
        ]
    }
}

/// Physical gradient for an element with corners `c`.
pub fn map_gradient(c: [Point; 3], g: [f64; 2]) -> Result<[f64; 2], FemError> {
    Ok(ElementMap::from_corners(c)?.map_gradient(g))
}
