use std::collections::HashMap;
use std::sync::Arc;

use super::{GeometryError, Point};

/// Subdomain an element belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subdomain {
    Elastic,
    Fluid,
}

/// Edge classes used by the discrete forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// Shared by two elastic elements.
    InteriorElastic,
    /// Shared by two fluid elements.
    InteriorFluid,
    /// Shared by one elastic and one fluid element.
    Interface,
    /// Fluid boundary edge on the truncation circle.
    Artificial,
    /// Traction-free elastic boundary edge. Carries no terms in the discrete
    /// forms; only meshes built with [`Mesh::with_free_elastic_boundary`]
    /// contain it.
    FreeElastic,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 4] = [
        EdgeKind::InteriorElastic,
        EdgeKind::InteriorFluid,
        EdgeKind::Interface,
        EdgeKind::Artificial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EdgeKind::InteriorElastic => "interior_elastic",
            EdgeKind::InteriorFluid => "interior_fluid",
            EdgeKind::Interface => "interface",
            EdgeKind::Artificial => "artificial",
            EdgeKind::FreeElastic => "free_elastic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub subdomain: Subdomain,
}

/// A mesh edge.
///
/// `vertices` are listed in the counter-clockwise order of the first adjacent
/// element, so the second element (if any) sees them reversed. The normal
/// points out of the first element. For interface edges the first element is
/// always the elastic one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub length: f64,
    pub normal: Point,
    pub kind: EdgeKind,
    pub elements: [usize; 2],
    /// Local edge number inside each adjacent element. Local edge `j` joins
    /// local vertices `j` and `(j + 1) % 3`.
    pub local: [usize; 2],
    /// Number of adjacent elements (1 or 2).
    pub sides: usize,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.sides == 1
    }

    /// Point at parameter `s` in `[0, 1]` measured from `vertices[0]`.
    pub fn point(&self, mesh: &Mesh, s: f64) -> Point {
        let a = mesh.vertices[self.vertices[0]];
        let b = mesh.vertices[self.vertices[1]];
        [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
    }
}

/// Circles that curved boundaries approximate. Refinement projects new
/// boundary vertices onto them.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurvedBoundary {
    pub center: Point,
    pub interface_radius: Option<f64>,
    pub outer_radius: Option<f64>,
}

/// Link from a refined mesh to the mesh it was refined from.
///
/// Children of coarse element `t` are `4t..4t + 4`, so the descendants of `t`
/// after `d` refinements are the contiguous range `t * 4^d..(t + 1) * 4^d`.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub parent: Arc<Mesh>,
    pub parent_index: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<Triangle>,
    pub edges: Vec<Edge>,
    /// Edge index of each local edge of every element.
    pub element_edges: Vec<[usize; 3]>,
    /// Largest element diameter.
    pub mesh_size: f64,
    pub boundary: CurvedBoundary,
    pub hierarchy: Option<Hierarchy>,
    /// Elements incident to each vertex, in increasing order.
    pub vertex_elements: Vec<Vec<usize>>,
}

pub(crate) fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl Mesh {
    /// Build a mesh from vertices and tagged triangles, classifying edges.
    ///
    /// Triangles must be counter-clockwise with positive area.
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<Triangle>,
        boundary: CurvedBoundary,
    ) -> Result<Mesh, GeometryError> {
        Self::build(vertices, triangles, boundary, false)
    }

    /// Like [`Mesh::new`] but elastic boundary edges away from the fluid are
    /// accepted as [`EdgeKind::FreeElastic`] instead of rejected.
    pub fn with_free_elastic_boundary(
        vertices: Vec<Point>,
        triangles: Vec<Triangle>,
        boundary: CurvedBoundary,
    ) -> Result<Mesh, GeometryError> {
        Self::build(vertices, triangles, boundary, true)
    }

    fn build(
        vertices: Vec<Point>,
        triangles: Vec<Triangle>,
        boundary: CurvedBoundary,
        allow_free_elastic: bool,
    ) -> Result<Mesh, GeometryError> {
        for (t, tri) in triangles.iter().enumerate() {
            for &v in &tri.vertices {
                if v >= vertices.len() {
                    return Err(GeometryError::InvalidMesh(format!(
                        "triangle {t} references missing vertex {v}"
                    )));
                }
            }
            let [a, b, c] = tri.vertices.map(|v| vertices[v]);
            let area = signed_area(a, b, c);
            let scale = dist(a, b).max(dist(b, c)).max(dist(c, a));
            if !(area > 1e-14 * scale * scale) {
                return Err(GeometryError::DegenerateElement { element: t, area });
            }
        }

        // Sorted vertex pair -> list of (element, local edge).
        let mut adjacency: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        let mut order: Vec<(usize, usize)> = Vec::new();
        for (t, tri) in triangles.iter().enumerate() {
            for j in 0..3 {
                let a = tri.vertices[j];
                let b = tri.vertices[(j + 1) % 3];
                let key = (a.min(b), a.max(b));
                let entry = adjacency.entry(key).or_default();
                if entry.is_empty() {
                    order.push(key);
                }
                entry.push((t, j));
            }
        }

        let mut edges = Vec::with_capacity(order.len());
        let mut element_edges = vec![[usize::MAX; 3]; triangles.len()];
        for key in order {
            let adj = &adjacency[&key];
            let (first, second) = match adj.as_slice() {
                [one] => (*one, None),
                [one, two] => {
                    let (t1, j1) = *one;
                    let (t2, j2) = *two;
                    let v1 = triangles[t1].vertices[j1];
                    let v2 = triangles[t2].vertices[j2];
                    if v1 == v2 {
                        return Err(GeometryError::InvalidMesh(format!(
                            "elements {t1} and {t2} traverse edge {key:?} in the same direction"
                        )));
                    }
                    let swap = triangles[t1].subdomain == Subdomain::Fluid
                        && triangles[t2].subdomain == Subdomain::Elastic;
                    if swap {
                        (*two, Some(*one))
                    } else {
                        (*one, Some(*two))
                    }
                }
                _ => {
                    return Err(GeometryError::InvalidMesh(format!(
                        "edge {key:?} is shared by {} elements",
                        adj.len()
                    )))
                }
            };
            let (t1, j1) = first;
            let tri = &triangles[t1];
            let a = tri.vertices[j1];
            let b = tri.vertices[(j1 + 1) % 3];
            let kind = match second {
                Some((t2, _)) => match (tri.subdomain, triangles[t2].subdomain) {
                    (Subdomain::Elastic, Subdomain::Elastic) => EdgeKind::InteriorElastic,
                    (Subdomain::Fluid, Subdomain::Fluid) => EdgeKind::InteriorFluid,
                    _ => EdgeKind::Interface,
                },
                None => match tri.subdomain {
                    Subdomain::Fluid => EdgeKind::Artificial,
                    Subdomain::Elastic if allow_free_elastic => EdgeKind::FreeElastic,
                    Subdomain::Elastic => {
                        return Err(GeometryError::UnclassifiableEdge {
                            vertices: [a, b],
                            reason: "elastic boundary edge is not on the fluid interface".into(),
                        })
                    }
                },
            };
            let pa = vertices[a];
            let pb = vertices[b];
            let length = dist(pa, pb);
            let normal = [(pb[1] - pa[1]) / length, -(pb[0] - pa[0]) / length];
            let (elements, local, sides) = match second {
                Some((t2, j2)) => ([t1, t2], [j1, j2], 2),
                None => ([t1, t1], [j1, j1], 1),
            };
            let e = edges.len();
            element_edges[t1][j1] = e;
            if let Some((t2, j2)) = second {
                element_edges[t2][j2] = e;
            }
            edges.push(Edge {
                vertices: [a, b],
                length,
                normal,
                kind,
                elements,
                local,
                sides,
            });
        }

        let mesh_size = triangles
            .iter()
            .map(|tri| {
                let [a, b, c] = tri.vertices.map(|v| vertices[v]);
                dist(a, b).max(dist(b, c)).max(dist(c, a))
            })
            .fold(0.0, f64::max);

        let mut vertex_elements = vec![Vec::new(); vertices.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in &tri.vertices {
                vertex_elements[v].push(t);
            }
        }

        Ok(Mesh {
            vertex_elements,
            vertices,
            triangles,
            edges,
            element_edges,
            mesh_size,
            boundary,
            hierarchy: None,
        })
    }

    pub fn num_elements(&self) -> usize {
        self.triangles.len()
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        self.triangles[t].vertices.map(|v| self.vertices[v])
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        signed_area(a, b, c)
    }

    pub fn diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        dist(a, b).max(dist(b, c)).max(dist(c, a))
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.corners(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    pub fn subdomain_area(&self, tag: Subdomain) -> f64 {
        (0..self.num_elements())
            .filter(|&t| self.triangles[t].subdomain == tag)
            .map(|t| self.area(t))
            .sum()
    }

    pub fn count_elements(&self, tag: Subdomain) -> usize {
        self.triangles.iter().filter(|t| t.subdomain == tag).count()
    }

    pub fn count_edges(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    pub fn edges_of_kind(&self, kind: EdgeKind) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.kind == kind)
    }

    /// Barycentric coordinates of `p` with respect to element `t`.
    pub fn barycentric(&self, t: usize, p: Point) -> [f64; 3] {
        let [a, b, c] = self.corners(t);
        let area = signed_area(a, b, c);
        let l0 = signed_area(p, b, c) / area;
        let l1 = signed_area(a, p, c) / area;
        [l0, l1, 1.0 - l0 - l1]
    }

    pub fn parent(&self) -> Option<&Arc<Mesh>> {
        self.hierarchy.as_ref().map(|h| &h.parent)
    }

    /// Number of refinements separating `ancestor` from this mesh, if it is
    /// on the hierarchy chain (identity included, at depth 0).
    pub fn depth_below(&self, ancestor: &Mesh) -> Option<usize> {
        let mut current: &Mesh = self;
        let mut depth = 0;
        loop {
            if std::ptr::eq(current, ancestor) {
                return Some(depth);
            }
            current = current.parent()?.as_ref();
            depth += 1;
        }
    }

    /// Length of the hierarchy chain above this mesh.
    pub fn hierarchy_len(&self) -> usize {
        let mut n = 0;
        let mut current = self.parent();
        while let Some(p) = current {
            n += 1;
            current = p.parent();
        }
        n
    }

    /// Meshes from the coarsest ancestor down to `self`.
    pub fn chain(&self) -> Vec<&Mesh> {
        let mut out = vec![self];
        let mut current = self.parent();
        while let Some(p) = current {
            out.push(p.as_ref());
            current = p.parent();
        }
        out.reverse();
        out
    }

    /// Ancestor of fine element `t` at `depth` refinements above.
    pub fn ancestor_of(t: usize, depth: usize) -> usize {
        t >> (2 * depth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles(tags: [Subdomain; 2]) -> Mesh {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let triangles = vec![
            Triangle { vertices: [0, 1, 2], subdomain: tags[0] },
            Triangle { vertices: [0, 2, 3], subdomain: tags[1] },
        ];
        Mesh::with_free_elastic_boundary(vertices, triangles, CurvedBoundary::default()).unwrap()
    }

    #[test]
    fn interface_edge_points_from_elastic_to_fluid() {
        let mesh = two_triangles([Subdomain::Fluid, Subdomain::Elastic]);
        let (_, e) = mesh.edges_of_kind(EdgeKind::Interface).next().unwrap();
        assert_eq!(mesh.triangles[e.elements[0]].subdomain, Subdomain::Elastic);
        // Elastic element is [0, 2, 3], above the diagonal; normal points down-right.
        assert!((e.normal[0] - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((e.normal[1] + 0.5f64.sqrt()).abs() < 1e-14);
        assert_eq!(mesh.count_edges(EdgeKind::Interface), 1);
        assert_eq!(mesh.count_edges(EdgeKind::Artificial), 2);
        assert_eq!(mesh.count_edges(EdgeKind::FreeElastic), 2);
    }

    #[test]
    fn elastic_boundary_is_rejected() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let triangles = vec![
            Triangle { vertices: [0, 1, 2], subdomain: Subdomain::Elastic },
            Triangle { vertices: [0, 2, 3], subdomain: Subdomain::Fluid },
        ];
        let err = Mesh::new(vertices, triangles, CurvedBoundary::default()).unwrap_err();
        assert!(matches!(err, GeometryError::UnclassifiableEdge { .. }));
    }

    #[test]
    fn clockwise_triangle_is_degenerate() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let triangles = vec![Triangle { vertices: [0, 2, 1], subdomain: Subdomain::Fluid }];
        assert!(Mesh::new(vertices, triangles, CurvedBoundary::default()).is_err());
    }

    #[test]
    fn barycentric_of_centroid() {
        let mesh = two_triangles([Subdomain::Fluid, Subdomain::Fluid]);
        let b = mesh.barycentric(1, mesh.centroid(1));
        for x in b {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }
}
