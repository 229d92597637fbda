//! Errors between a coarse solution and a reference solution on a finer mesh.
//!
//! When the reference mesh descends from the coarse one through the
//! refinement hierarchy, integrals run over the fine elements (the
//! difference is a polynomial there) and each fine point evaluates the
//! coarse polynomial of its ancestor. Jump terms are taken on the fine edges
//! that lie on coarse edges, i.e. on every coarse edge split into its
//! sub-segments. Otherwise the coarse quadrature points are located on the
//! reference mesh.

use rayon::prelude::*;

use crate::assembly::PhysicalParams;
use crate::fem::ElementMap;
use crate::geometry::{locate_point, EdgeKind, GeometryError, Mesh, Point};

use super::norms::{jump_density, FieldNorms, NormOptions};
use super::{DiscreteField, ErrorRecord, LocalValue};

#[derive(Debug, thiserror::Error)]
pub enum CrossMeshError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("reference solution lies in the other subdomain at {point:?}")]
    SubdomainMismatch { point: Point },
}

fn add(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

/// Sums are (energy elastic, energy fluid, L² elastic, L² fluid), squared.
fn finish(h: f64, volume: [f64; 4], jumps: [f64; 2]) -> ErrorRecord {
    let energy = FieldNorms::from_squares([volume[0] + jumps[0] / h, volume[1] + jumps[1] / h]);
    let l2 = FieldNorms::from_squares([volume[2], volume[3]]);
    ErrorRecord { h, energy_error: energy.combined(), l2_error: l2.combined(), energy, l2 }
}

fn volume_terms(d: &LocalValue, params: &PhysicalParams, w: f64, elastic: bool) -> [f64; 4] {
    let (e, l) = (w * d.energy_density(params), w * d.value_squared());
    if elastic {
        [e, 0.0, l, 0.0]
    } else {
        [0.0, e, 0.0, l]
    }
}

/// Energy and L² norms of `coarse - reference`, with the jump weight 1/h of
/// the coarse mesh.
pub fn cross_mesh_error(
    coarse: &DiscreteField,
    reference: &DiscreteField,
    params: &PhysicalParams,
    opts: &NormOptions,
) -> Result<ErrorRecord, CrossMeshError> {
    match reference.mesh.depth_below(coarse.mesh) {
        Some(depth) => Ok(nested_error(coarse, reference, params, opts, depth)),
        None => located_error(coarse, reference, params, opts),
    }
}

fn nested_error(
    coarse: &DiscreteField,
    fine: &DiscreteField,
    params: &PhysicalParams,
    opts: &NormOptions,
    depth: usize,
) -> ErrorRecord {
    let fmesh = fine.mesh;
    let basis = fine.basis;
    let volume = (0..fmesh.num_elements())
        .into_par_iter()
        .map(|t| {
            let map = ElementMap::of(fmesh, t);
            let parent = Mesh::ancestor_of(t, depth);
            let elastic = fine.dofs.is_elastic(t);
            let mut sum = [0.0; 4];
            for (q, w) in basis.volume_rule.weights.iter().enumerate() {
                let f = fine.combine(t, &map, &basis.values[q], &basis.grads[q]);
                let c = coarse.eval(parent, map.to_physical(basis.volume_rule.points[q]));
                sum = add(sum, volume_terms(&c.minus(&f), params, w * map.det, elastic));
            }
            sum
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold([0.0; 4], add);
    let rule = &basis.edge_rule;
    let jumps = (0..fmesh.edges.len())
        .into_par_iter()
        .map(|e| {
            let edge = &fmesh.edges[e];
            if !opts.wants(edge.kind) {
                return [0.0; 2];
            }
            let parents = edge.elements.map(|t| Mesh::ancestor_of(t, depth));
            if edge.kind != EdgeKind::Interface && parents[0] == parents[1] {
                // Inside a coarse element.
                return [0.0; 2];
            }
            let mut sum = [0.0; 2];
            for (s, w) in rule.points.iter().zip(&rule.weights) {
                let x = edge.point(fmesh, *s);
                let sides: Vec<LocalValue> = (0..edge.sides)
                    .map(|k| coarse.eval(parents[k], x).minus(&fine.eval(edge.elements[k], x)))
                    .collect();
                let d = jump_density(edge.kind, opts.jump, edge.normal, &sides);
                sum[0] += w * edge.length * d[0];
                sum[1] += w * edge.length * d[1];
            }
            sum
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold([0.0; 2], |a, b| [a[0] + b[0], a[1] + b[1]]);
    finish(coarse.mesh.mesh_size, volume, jumps)
}

/// Reference value at `x` as seen from coarse element `t`: the point is
/// nudged towards the centroid of `t` before location so that traces on
/// coarse edges come from the correct side.
fn reference_value(coarse: &DiscreteField, reference: &DiscreteField, t: usize, x: Point) -> Result<LocalValue, CrossMeshError> {
    let c = coarse.mesh.centroid(t);
    let eps = 1e-8;
    let probe = [x[0] + eps * (c[0] - x[0]), x[1] + eps * (c[1] - x[1])];
    let (rt, _) = locate_point(reference.mesh, probe)?;
    if reference.dofs.is_elastic(rt) != coarse.dofs.is_elastic(t) {
        return Err(CrossMeshError::SubdomainMismatch { point: x });
    }
    Ok(reference.eval(rt, x))
}

fn located_error(
    coarse: &DiscreteField,
    reference: &DiscreteField,
    params: &PhysicalParams,
    opts: &NormOptions,
) -> Result<ErrorRecord, CrossMeshError> {
    let cmesh = coarse.mesh;
    let basis = coarse.basis;
    let volume = (0..cmesh.num_elements())
        .into_par_iter()
        .map(|t| -> Result<[f64; 4], CrossMeshError> {
            let map = ElementMap::of(cmesh, t);
            let elastic = coarse.dofs.is_elastic(t);
            let mut sum = [0.0; 4];
            for (q, w) in basis.volume_rule.weights.iter().enumerate() {
                let c = coarse.combine(t, &map, &basis.values[q], &basis.grads[q]);
                let x = map.to_physical(basis.volume_rule.points[q]);
                let r = reference_value(coarse, reference, t, x)?;
                sum = add(sum, volume_terms(&c.minus(&r), params, w * map.det, elastic));
            }
            Ok(sum)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold([0.0; 4], add);
    let rule = &basis.edge_rule;
    let jumps = (0..cmesh.edges.len())
        .into_par_iter()
        .map(|e| -> Result<[f64; 2], CrossMeshError> {
            let edge = &cmesh.edges[e];
            let mut sum = [0.0; 2];
            if !opts.wants(edge.kind) {
                return Ok(sum);
            }
            for (s, w) in rule.points.iter().zip(&rule.weights) {
                let x = edge.point(cmesh, *s);
                let mut sides = Vec::with_capacity(2);
                for k in 0..edge.sides {
                    let t = edge.elements[k];
                    sides.push(coarse.eval(t, x).minus(&reference_value(coarse, reference, t, x)?));
                }
                let d = jump_density(edge.kind, opts.jump, edge.normal, &sides);
                sum[0] += w * edge.length * d[0];
                sum[1] += w * edge.length * d[1];
            }
            Ok(sum)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold([0.0; 2], |a, b| [a[0] + b[0], a[1] + b[1]]);
    Ok(finish(cmesh.mesh_size, volume, jumps))
}
