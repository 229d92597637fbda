use nalgebra::{DMatrix, DVector};

use super::quadrature::{EdgeRule, TriangleRule};
use super::FemError;

/// Reference triangle vertices (0,0), (1,0), (0,1).
pub const REFERENCE_VERTICES: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

/// Nodal Lagrange basis of P_k on the reference triangle with equispaced nodes.
///
/// Node order: the three vertices, then `k - 1` nodes on each local edge
/// (edge `j` runs from vertex `j` to vertex `j + 1`), then interior nodes.
#[derive(Debug, Clone)]
pub struct ReferenceBasis {
    pub degree: usize,
    pub n_local: usize,
    pub nodes: Vec<[f64; 2]>,
    exponents: Vec<(i32, i32)>,
    /// Monomial coefficients, column `j` belongs to basis function `j`.
    coeffs: DMatrix<f64>,
    pub volume_rule: TriangleRule,
    /// `values[q][j]` = φ_j at volume point q.
    pub values: Vec<Vec<f64>>,
    /// `grads[q][j]` = reference gradient of φ_j at volume point q.
    pub grads: Vec<Vec<[f64; 2]>>,
    pub edge_rule: EdgeRule,
    /// `edge_values[edge][orientation][q][j]`; orientation 1 walks the edge backwards.
    pub edge_values: [[Vec<Vec<f64>>; 2]; 3],
    /// `edge_grads[edge][orientation][q][j]`, reference gradients on edges.
    pub edge_grads: [[Vec<Vec<[f64; 2]>>; 2]; 3],
    /// ∫ φ_i φ_j over the reference triangle.
    pub mass: DMatrix<f64>,
    pub mass_inv: DMatrix<f64>,
}

pub const MAX_DEGREE: usize = 4;

impl ReferenceBasis {
    pub fn new(degree: usize) -> Result<Self, FemError> {
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(FemError::UnsupportedDegree(degree));
        }
        let k = degree;
        let n_local = (k + 1) * (k + 2) / 2;
        let nodes = lagrange_nodes(k);
        let exponents: Vec<(i32, i32)> = (0..=k as i32)
            .flat_map(|d| (0..=d).map(move |b| (d - b, b)))
            .collect();
        let vandermonde = DMatrix::from_fn(n_local, n_local, |i, m| {
            let (a, b) = exponents[m];
            nodes[i][0].powi(a) * nodes[i][1].powi(b)
        });
        let coeffs = vandermonde
            .try_inverse()
            .expect("equispaced Lagrange nodes are unisolvent");

        let mut basis = ReferenceBasis {
            degree,
            n_local,
            nodes,
            exponents,
            coeffs,
            volume_rule: TriangleRule::with_degree(2 * k + 2),
            values: Vec::new(),
            grads: Vec::new(),
            edge_rule: EdgeRule::with_points(k + 2),
            edge_values: Default::default(),
            edge_grads: Default::default(),
            mass: DMatrix::zeros(n_local, n_local),
            mass_inv: DMatrix::zeros(n_local, n_local),
        };

        basis.values = basis.volume_rule.points.iter().map(|&p| basis.eval(p)).collect();
        basis.grads = basis.volume_rule.points.iter().map(|&p| basis.eval_grad(p)).collect();
        for edge in 0..3 {
            for orientation in 0..2 {
                let pts: Vec<[f64; 2]> = basis
                    .edge_rule
                    .points
                    .iter()
                    .map(|&s| edge_point(edge, if orientation == 0 { s } else { 1.0 - s }))
                    .collect();
                basis.edge_values[edge][orientation] = pts.iter().map(|&p| basis.eval(p)).collect();
                basis.edge_grads[edge][orientation] =
                    pts.iter().map(|&p| basis.eval_grad(p)).collect();
            }
        }

        let mut mass = DMatrix::zeros(n_local, n_local);
        for (q, w) in basis.volume_rule.weights.iter().enumerate() {
            let v = &basis.values[q];
            for i in 0..n_local {
                for j in 0..n_local {
                    mass[(i, j)] += w * v[i] * v[j];
                }
            }
        }
        basis.mass_inv = mass.clone().try_inverse().expect("reference mass is SPD");
        basis.mass = mass;
        Ok(basis)
    }

    /// All basis functions at a reference point.
    pub fn eval(&self, p: [f64; 2]) -> Vec<f64> {
        let mono = DVector::from_iterator(
            self.n_local,
            self.exponents.iter().map(|&(a, b)| p[0].powi(a) * p[1].powi(b)),
        );
        (self.coeffs.transpose() * mono).iter().copied().collect()
    }

    /// All reference gradients at a reference point.
    pub fn eval_grad(&self, p: [f64; 2]) -> Vec<[f64; 2]> {
        let pow = |x: f64, e: i32| if e < 0 { 0.0 } else { x.powi(e) };
        let dx = DVector::from_iterator(
            self.n_local,
            self.exponents.iter().map(|&(a, b)| a as f64 * pow(p[0], a - 1) * pow(p[1], b)),
        );
        let dy = DVector::from_iterator(
            self.n_local,
            self.exponents.iter().map(|&(a, b)| b as f64 * pow(p[0], a) * pow(p[1], b - 1)),
        );
        let gx = self.coeffs.transpose() * dx;
        let gy = self.coeffs.transpose() * dy;
        (0..self.n_local).map(|j| [gx[j], gy[j]]).collect()
    }

    /// Evaluate the polynomial with local coefficients `c` at a reference point.
    pub fn eval_combination(&self, c: &[f64], p: [f64; 2]) -> f64 {
        self.eval(p).iter().zip(c).map(|(a, b)| a * b).sum()
    }
}

/// Point at parameter `s` along local edge `edge` (from vertex `edge` to `edge + 1`).
pub fn edge_point(edge: usize, s: f64) -> [f64; 2] {
    let a = REFERENCE_VERTICES[edge];
    let b = REFERENCE_VERTICES[(edge + 1) % 3];
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

fn lagrange_nodes(k: usize) -> Vec<[f64; 2]> {
    let h = 1.0 / k as f64;
    let mut nodes: Vec<[f64; 2]> = REFERENCE_VERTICES.to_vec();
    for edge in 0..3 {
        for i in 1..k {
            nodes.push(edge_point(edge, i as f64 * h));
        }
    }
    for j in 1..k {
        for i in 1..k - j {
            nodes.push([i as f64 * h, j as f64 * h]);
        }
    }
    nodes
}
