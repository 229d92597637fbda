//! Linear solves with the Newmark effective matrix.
//!
//! With δ = 0 the effective matrix M + γlN couples only elements that share
//! an interface edge, so it splits into many tiny connected components that
//! are factorized densely. When a component grows past `DENSE_COMPONENT_LIMIT`
//! (δ > 0 couples everything through A) BiCGSTAB with a block-Jacobi
//! preconditioner takes over.

use nalgebra::{DMatrix, DVector, LU};
use rayon::prelude::*;

use crate::sparse::CsrMatrix;

use super::TimeError;

pub const DENSE_COMPONENT_LIMIT: usize = 600;
pub const RELATIVE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// ‖b - Ax‖ / ‖b‖ (0 for b = 0).
    pub residual: f64,
}

/// Connected components of the sparsity graph, each sorted, ordered by
/// smallest index.
pub fn connected_components(a: &CsrMatrix) -> Vec<Vec<usize>> {
    let n = a.nrows;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for r in 0..n {
        for (c, v) in a.row(r) {
            if v != 0.0 {
                let (x, y) = (find(&mut parent, r), find(&mut parent, c));
                if x != y {
                    parent[x.max(y)] = x.min(y);
                }
            }
        }
    }
    let mut index = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        if index[root] == usize::MAX {
            index[root] = comps.len();
            comps.push(Vec::new());
        }
        comps[index[root]].push(i);
    }
    comps
}

pub struct BlockLu {
    dofs: Vec<usize>,
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

fn factor_blocks(a: &CsrMatrix, blocks: Vec<Vec<usize>>) -> Result<Vec<BlockLu>, TimeError> {
    let mut position = vec![usize::MAX; a.nrows];
    for b in &blocks {
        for (k, &i) in b.iter().enumerate() {
            position[i] = k;
        }
    }
    blocks
        .into_par_iter()
        .map(|dofs| {
            let m = dofs.len();
            let mut d = DMatrix::zeros(m, m);
            for (k, &r) in dofs.iter().enumerate() {
                for (c, v) in a.row(r) {
                    let p = position[c];
                    // Entries leaving the block are dropped (block-Jacobi).
                    if p < m && dofs.get(p) == Some(&c) {
                        d[(k, p)] = v;
                    }
                }
            }
            let lu = d.lu();
            if !lu.is_invertible() {
                return Err(TimeError::SingularBlock { first_dof: dofs[0] });
            }
            Ok(BlockLu { dofs, lu })
        })
        .collect()
}

fn apply_blocks(blocks: &[BlockLu], b: &[f64], x: &mut [f64]) {
    let parts: Vec<DVector<f64>> = blocks
        .par_iter()
        .map(|blk| {
            let rhs = DVector::from_iterator(blk.dofs.len(), blk.dofs.iter().map(|&i| b[i]));
            blk.lu.solve(&rhs).expect("factor checked invertible")
        })
        .collect();
    for (blk, sol) in blocks.iter().zip(parts) {
        for (k, &i) in blk.dofs.iter().enumerate() {
            x[i] = sol[k];
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub enum LinearSolver {
    Direct { matrix: CsrMatrix, blocks: Vec<BlockLu> },
    Iterative { matrix: CsrMatrix, preconditioner: Vec<BlockLu>, max_iterations: usize },
}

impl LinearSolver {
    /// `preconditioner_pattern` supplies the diagonal blocks used by the
    /// iterative path (typically the mass matrix, whose components are the
    /// element blocks).
    pub fn new(matrix: CsrMatrix, preconditioner_pattern: &CsrMatrix) -> Result<Self, TimeError> {
        let comps = connected_components(&matrix);
        let largest = comps.iter().map(Vec::len).max().unwrap_or(0);
        if largest <= DENSE_COMPONENT_LIMIT {
            let blocks = factor_blocks(&matrix, comps)?;
            Ok(LinearSolver::Direct { matrix, blocks })
        } else {
            let preconditioner = factor_blocks(&matrix, connected_components(preconditioner_pattern))?;
            let max_iterations = ((10.0 * (matrix.nrows as f64).sqrt()).ceil() as usize).max(10);
            Ok(LinearSolver::Iterative { matrix, preconditioner, max_iterations })
        }
    }

    pub fn is_direct(&self) -> bool {
        matches!(self, LinearSolver::Direct { .. })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        match self {
            LinearSolver::Direct { matrix, .. } | LinearSolver::Iterative { matrix, .. } => matrix,
        }
    }

    pub fn solve(&self, b: &[f64], x: &mut [f64]) -> Result<SolveStats, TimeError> {
        let bn = norm(b);
        if bn == 0.0 {
            x.iter_mut().for_each(|v| *v = 0.0);
            return Ok(SolveStats::default());
        }
        match self {
            LinearSolver::Direct { matrix, blocks } => {
                apply_blocks(blocks, b, x);
                let r = matrix.matvec(x);
                let res = norm(&r.iter().zip(b).map(|(a, b)| b - a).collect::<Vec<_>>()) / bn;
                if res > RELATIVE_TOLERANCE {
                    return Err(TimeError::SolverFailed { iterations: 1, residual: res });
                }
                Ok(SolveStats { iterations: 1, residual: res })
            }
            LinearSolver::Iterative { matrix, preconditioner, max_iterations } => {
                bicgstab(matrix, preconditioner, b, x, *max_iterations)
            }
        }
    }
}

/// Right-preconditioned BiCGSTAB starting from the incoming `x`.
fn bicgstab(
    a: &CsrMatrix,
    pre: &[BlockLu],
    b: &[f64],
    x: &mut [f64],
    max_iterations: usize,
) -> Result<SolveStats, TimeError> {
    let n = b.len();
    let bn = norm(b);
    let ax = a.matvec(x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let r0 = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut res = norm(&r) / bn;
    for it in 1..=max_iterations {
        if res <= RELATIVE_TOLERANCE {
            return Ok(SolveStats { iterations: it - 1, residual: res });
        }
        let rho_new = dot(&r0, &r);
        if rho_new == 0.0 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        apply_blocks(pre, &p, &mut y);
        a.matvec_into(&y, &mut v);
        alpha = rho / dot(&r0, &v);
        let s: Vec<f64> = r.iter().zip(&v).map(|(r, v)| r - alpha * v).collect();
        if norm(&s) / bn <= RELATIVE_TOLERANCE {
            for i in 0..n {
                x[i] += alpha * y[i];
            }
            return Ok(SolveStats { iterations: it, residual: norm(&s) / bn });
        }
        apply_blocks(pre, &s, &mut z);
        let t = a.matvec(&z);
        omega = dot(&t, &s) / dot(&t, &t);
        for i in 0..n {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
        res = norm(&r) / bn;
        if omega == 0.0 {
            break;
        }
    }
    if res <= RELATIVE_TOLERANCE {
        return Ok(SolveStats { iterations: max_iterations, residual: res });
    }
    Err(TimeError::SolverFailed { iterations: max_iterations, residual: res })
}
