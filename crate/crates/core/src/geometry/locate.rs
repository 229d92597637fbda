use super::mesh::Mesh;
use super::{GeometryError, Point};

/// Tolerance on barycentric coordinates for "inside".
pub const INSIDE_TOL: f64 = 1e-9;

fn min3(b: [f64; 3]) -> f64 {
    b[0].min(b[1]).min(b[2])
}

/// Find the element containing `p` together with its barycentric coordinates.
///
/// Ties (points on shared edges or vertices) go to the lowest element index.
/// Refined meshes descend from their coarsest ancestor; others walk from
/// element 0 and fall back to a scan. Points slightly outside the mesh (within
/// `1e-6 h`) are attributed to the nearest element.
pub fn locate_point(mesh: &Mesh, p: Point) -> Result<(usize, [f64; 3]), GeometryError> {
    let candidate = if mesh.hierarchy.is_some() {
        let chain = mesh.chain();
        let root = chain[0];
        let mut t = best_element(root, p, 0..root.num_elements()).0;
        for level in &chain[1..] {
            t = best_element(level, p, 4 * t..4 * t + 4).0;
        }
        t
    } else {
        walk(mesh, p)
    };

    let b = mesh.barycentric(candidate, p);
    let t = if min3(b) >= -INSIDE_TOL {
        candidate
    } else {
        // Descent can end next to the right element near projected boundaries.
        let w = walk_from(mesh, p, candidate);
        if min3(mesh.barycentric(w, p)) >= -INSIDE_TOL {
            w
        } else {
            best_element(mesh, p, 0..mesh.num_elements()).0
        }
    };

    let b = mesh.barycentric(t, p);
    if min3(b) >= -INSIDE_TOL {
        return Ok(lowest_containing(mesh, t, p));
    }
    let distance = distance_to_element(mesh, t, p);
    if distance <= 1e-6 * mesh.mesh_size {
        Ok((t, b))
    } else {
        Err(GeometryError::PointNotFound { point: p, distance })
    }
}

/// Element among `range` maximizing the smallest barycentric coordinate.
pub(crate) fn best_element(
    mesh: &Mesh,
    p: Point,
    range: std::ops::Range<usize>,
) -> (usize, [f64; 3]) {
    let mut best = (range.start, [f64::NEG_INFINITY; 3]);
    let mut best_min = f64::NEG_INFINITY;
    for t in range {
        let b = mesh.barycentric(t, p);
        let m = min3(b);
        if m > best_min {
            best_min = m;
            best = (t, b);
        }
    }
    best
}

/// Descend from element `coarse` of an ancestor `depth` levels above `mesh`
/// to the fine element whose polynomial should represent the field at `p`.
/// Always succeeds; points outside every child go to the closest one.
pub fn descend(mesh: &Mesh, depth: usize, coarse: usize, p: Point) -> (usize, [f64; 3]) {
    if depth == 0 {
        return (coarse, mesh.barycentric(coarse, p));
    }
    let chain = mesh.chain();
    let start = chain.len() - 1 - depth;
    let mut t = coarse;
    let mut out = (coarse, [0.0; 3]);
    for level in &chain[start + 1..] {
        out = best_element(level, p, 4 * t..4 * t + 4);
        t = out.0;
    }
    out
}

fn walk(mesh: &Mesh, p: Point) -> usize {
    walk_from(mesh, p, 0)
}

/// Move across the edge opposite the most negative barycentric coordinate
/// until the point is inside or the walk leaves the mesh.
fn walk_from(mesh: &Mesh, p: Point, start: usize) -> usize {
    let mut t = start;
    for _ in 0..mesh.num_elements() {
        let b = mesh.barycentric(t, p);
        let (i, &m) = b
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        if m >= -INSIDE_TOL {
            return t;
        }
        // Local edge opposite vertex i joins vertices i+1 and i+2, i.e. local edge (i+1)%3.
        let e = &mesh.edges[mesh.element_edges[t][(i + 1) % 3]];
        if e.is_boundary() {
            break;
        }
        t = if e.elements[0] == t { e.elements[1] } else { e.elements[0] };
    }
    best_element(mesh, p, 0..mesh.num_elements()).0
}

fn lowest_containing(mesh: &Mesh, t: usize, p: Point) -> (usize, [f64; 3]) {
    let mut best = (t, mesh.barycentric(t, p));
    for &v in &mesh.triangles[t].vertices {
        for &s in &mesh.vertex_elements[v] {
            if s >= best.0 {
                break;
            }
            let b = mesh.barycentric(s, p);
            if min3(b) >= -INSIDE_TOL {
                best = (s, b);
            }
        }
    }
    best
}

fn distance_to_element(mesh: &Mesh, t: usize, p: Point) -> f64 {
    let c = mesh.corners(t);
    (0..3)
        .map(|j| segment_distance(p, c[j], c[(j + 1) % 3]))
        .fold(f64::INFINITY, f64::min)
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let s = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
    (p[0] - a[0] - s * d[0]).hypot(p[1] - a[1] - s * d[1])
}
