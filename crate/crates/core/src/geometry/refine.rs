use std::collections::HashMap;
use std::sync::Arc;

use super::mesh::{EdgeKind, Hierarchy, Mesh, Triangle};
use super::{GeometryError, Point};

/// Split every triangle into four through its edge midpoints.
///
/// Child `c` of element `t` gets index `4t + c`; child 3 is the central
/// triangle. Midpoints of interface and artificial edges are pushed radially
/// onto the circles recorded in `mesh.boundary`, when present.
pub fn refine_uniform(mesh: &Arc<Mesh>) -> Result<Mesh, GeometryError> {
    let mut vertices = mesh.vertices.clone();
    let mut midpoint_of: HashMap<usize, usize> = HashMap::with_capacity(mesh.edges.len());
    let boundary = mesh.boundary;

    for (e, edge) in mesh.edges.iter().enumerate() {
        let a = mesh.vertices[edge.vertices[0]];
        let b = mesh.vertices[edge.vertices[1]];
        let mut m: Point = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let radius = match edge.kind {
            EdgeKind::Interface => boundary.interface_radius,
            EdgeKind::Artificial => boundary.outer_radius,
            _ => None,
        };
        if let Some(r) = radius {
            let dx = m[0] - boundary.center[0];
            let dy = m[1] - boundary.center[1];
            let s = r / dx.hypot(dy);
            m = [boundary.center[0] + s * dx, boundary.center[1] + s * dy];
        }
        vertices.push(m);
        midpoint_of.insert(e, vertices.len() - 1);
    }

    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    let mut parent_index = Vec::with_capacity(4 * mesh.triangles.len());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let [v0, v1, v2] = tri.vertices;
        let [e01, e12, e20] = mesh.element_edges[t];
        let (m01, m12, m20) = (midpoint_of[&e01], midpoint_of[&e12], midpoint_of[&e20]);
        for vs in [[v0, m01, m20], [m01, v1, m12], [m20, m12, v2], [m01, m12, m20]] {
            triangles.push(Triangle { vertices: vs, subdomain: tri.subdomain });
            parent_index.push(t);
        }
    }

    let mut fine = Mesh::new(vertices, triangles, boundary)?;
    fine.hierarchy = Some(Hierarchy { parent: Arc::clone(mesh), parent_index });
    Ok(fine)
}

/// Refine `levels` times, returning every mesh of the hierarchy starting with
/// the input.
pub fn refine_hierarchy(base: Mesh, levels: usize) -> Result<Vec<Arc<Mesh>>, GeometryError> {
    let mut out = vec![Arc::new(base)];
    for _ in 0..levels {
        let next = refine_uniform(out.last().unwrap())?;
        out.push(Arc::new(next));
    }
    Ok(out)
}
