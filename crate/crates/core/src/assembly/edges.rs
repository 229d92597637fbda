use crate::fem::{ElementMap, ReferenceBasis};
use crate::geometry::{Mesh, Point};

/// Traces of one adjacent element's basis on an edge.
#[derive(Debug, Clone)]
pub struct EdgeSide {
    pub element: usize,
    /// `values[q][j]`
    pub values: Vec<Vec<f64>>,
    /// Physical gradients `grads[q][j]`.
    pub grads: Vec<Vec<[f64; 2]>>,
}

/// Quadrature data of a mesh edge, parametrized from its first to its second
/// vertex. Side 0 is the element the normal points away from.
#[derive(Debug, Clone)]
pub struct EdgeQuadrature {
    pub points: Vec<Point>,
    /// Gauss weights times edge length.
    pub weights: Vec<f64>,
    pub normal: [f64; 2],
    pub length: f64,
    pub sides: Vec<EdgeSide>,
}

impl EdgeQuadrature {
    pub fn new(mesh: &Mesh, basis: &ReferenceBasis, e: usize) -> Self {
        let edge = &mesh.edges[e];
        let a = mesh.vertices[edge.vertices[0]];
        let b = mesh.vertices[edge.vertices[1]];
        let rule = &basis.edge_rule;
        let points = rule
            .points
            .iter()
            .map(|&s| [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])])
            .collect();
        let weights = rule.weights.iter().map(|w| w * edge.length).collect();
        // The second element traverses the edge in the opposite direction.
        let sides = (0..edge.sides)
            .map(|s| {
                let t = edge.elements[s];
                let map = ElementMap::of(mesh, t);
                let local = edge.local[s];
                let grads = basis.edge_grads[local][s]
                    .iter()
                    .map(|row| row.iter().map(|&g| map.map_gradient(g)).collect())
                    .collect();
                EdgeSide { element: t, values: basis.edge_values[local][s].clone(), grads }
            })
            .collect();
        EdgeQuadrature { points, weights, normal: edge.normal, length: edge.length, sides }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
