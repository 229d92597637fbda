//! Gmsh MSH 2.2 ASCII import and export.
//!
//! Only 3-node triangles (element type 2) are read; their first tag is the
//! physical group, 1 for elastic and 2 for fluid. Lines, points and other
//! element types are skipped, as are unknown sections.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::mesh::{signed_area, CurvedBoundary, Mesh, Subdomain, Triangle};
use super::{GeometryError, Point};

pub const PHYSICAL_ELASTIC: usize = 1;
pub const PHYSICAL_FLUID: usize = 2;

pub fn import_msh(path: &Path, boundary: CurvedBoundary) -> Result<Mesh, GeometryError> {
    let text = std::fs::read_to_string(path).map_err(|source| GeometryError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_msh(&text, boundary)
}

/// Parse MSH text. Elastic boundary edges not on the interface are an error.
pub fn parse_msh(text: &str, boundary: CurvedBoundary) -> Result<Mesh, GeometryError> {
    let (vertices, triangles) = read_msh(text)?;
    Mesh::new(vertices, triangles, boundary)
}

/// Parse MSH text, keeping elastic boundary edges as traction-free edges.
pub fn parse_msh_free_elastic(text: &str, boundary: CurvedBoundary) -> Result<Mesh, GeometryError> {
    let (vertices, triangles) = read_msh(text)?;
    Mesh::with_free_elastic_boundary(vertices, triangles, boundary)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            let l = l.trim();
            if !l.is_empty() {
                return Some((i + 1, l));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), GeometryError> {
        let last = self.last;
        self.next().ok_or_else(|| parse_error(last + 1, format!("unexpected end of file, expected {what}")))
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> GeometryError {
    GeometryError::Parse { line, message: message.into() }
}

fn number<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, GeometryError> {
    let tok = tok.ok_or_else(|| parse_error(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_error(line, format!("invalid {what} '{tok}'")))
}

fn read_msh(text: &str) -> Result<(Vec<Point>, Vec<Triangle>), GeometryError> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let mut node_index: HashMap<usize, usize> = HashMap::new();
    let mut vertices: Vec<Point> = Vec::new();
    let mut raw_triangles: Vec<(usize, [usize; 3], usize)> = Vec::new();
    let mut seen_format = false;

    while let Some((ln, line)) = lines.next() {
        match line {
            "$MeshFormat" => {
                let (ln, l) = lines.expect("format line")?;
                let mut toks = l.split_whitespace();
                let version: String = number(toks.next(), ln, "version")?;
                let file_type: u32 = number(toks.next(), ln, "file type")?;
                if !version.starts_with("2.2") {
                    return Err(parse_error(ln, format!("unsupported MSH version {version}")));
                }
                if file_type != 0 {
                    return Err(parse_error(ln, "binary MSH files are not supported"));
                }
                close_section(&mut lines, "$EndMeshFormat")?;
                seen_format = true;
            }
            "$Nodes" => {
                let (ln, l) = lines.expect("node count")?;
                let count: usize = number(Some(l), ln, "node count")?;
                for _ in 0..count {
                    let (ln, l) = lines.expect("node")?;
                    let mut toks = l.split_whitespace();
                    let id: usize = number(toks.next(), ln, "node id")?;
                    let x: f64 = number(toks.next(), ln, "x coordinate")?;
                    let y: f64 = number(toks.next(), ln, "y coordinate")?;
                    let _z: f64 = number(toks.next(), ln, "z coordinate")?;
                    if node_index.insert(id, vertices.len()).is_some() {
                        return Err(parse_error(ln, format!("duplicate node id {id}")));
                    }
                    vertices.push([x, y]);
                }
                close_section(&mut lines, "$EndNodes")?;
            }
            "$Elements" => {
                let (ln, l) = lines.expect("element count")?;
                let count: usize = number(Some(l), ln, "element count")?;
                for _ in 0..count {
                    let (ln, l) = lines.expect("element")?;
                    let mut toks = l.split_whitespace();
                    let _id: usize = number(toks.next(), ln, "element id")?;
                    let kind: usize = number(toks.next(), ln, "element type")?;
                    let ntags: usize = number(toks.next(), ln, "tag count")?;
                    let tags: Vec<usize> = (0..ntags)
                        .map(|_| number(toks.next(), ln, "tag"))
                        .collect::<Result<_, _>>()?;
                    if kind != 2 {
                        continue;
                    }
                    let physical = *tags
                        .first()
                        .ok_or_else(|| parse_error(ln, "triangle without physical tag"))?;
                    let mut nodes = [0usize; 3];
                    for n in nodes.iter_mut() {
                        *n = number(toks.next(), ln, "node reference")?;
                    }
                    raw_triangles.push((ln, nodes, physical));
                }
                close_section(&mut lines, "$EndElements")?;
            }
            l if l.starts_with("$End") => {
                return Err(parse_error(ln, format!("unmatched {l}")));
            }
            l if l.starts_with('$') => {
                let end = format!("$End{}", &l[1..]);
                loop {
                    let (_, inner) = lines.expect(&end)?;
                    if inner == end {
                        break;
                    }
                }
            }
            other => return Err(parse_error(ln, format!("unexpected content '{other}'"))),
        }
    }

    if !seen_format {
        return Err(parse_error(1, "missing $MeshFormat section"));
    }
    if raw_triangles.is_empty() {
        return Err(parse_error(lines.last, "no triangles found"));
    }

    let mut triangles = Vec::with_capacity(raw_triangles.len());
    for (ln, nodes, physical) in raw_triangles {
        let subdomain = match physical {
            PHYSICAL_ELASTIC => Subdomain::Elastic,
            PHYSICAL_FLUID => Subdomain::Fluid,
            other => return Err(parse_error(ln, format!("unknown physical tag {other}"))),
        };
        let mut vs = [0usize; 3];
        for (v, id) in vs.iter_mut().zip(nodes) {
            *v = *node_index
                .get(&id)
                .ok_or_else(|| parse_error(ln, format!("unknown node {id}")))?;
        }
        if signed_area(vertices[vs[0]], vertices[vs[1]], vertices[vs[2]]) < 0.0 {
            vs.swap(1, 2);
        }
        triangles.push(Triangle { vertices: vs, subdomain });
    }
    Ok((vertices, triangles))
}

fn close_section(lines: &mut Lines, end: &str) -> Result<(), GeometryError> {
    let (ln, l) = lines.expect(end)?;
    if l != end {
        return Err(parse_error(ln, format!("expected {end}, found '{l}'")));
    }
    Ok(())
}

/// Serialize a mesh as MSH 2.2 ASCII (triangles only).
pub fn write_msh(mesh: &Mesh) -> String {
    let mut out = String::new();
    out.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");
    let _ = writeln!(out, "$Nodes\n{}", mesh.vertices.len());
    for (i, p) in mesh.vertices.iter().enumerate() {
        let _ = writeln!(out, "{} {:.17e} {:.17e} 0", i + 1, p[0], p[1]);
    }
    out.push_str("$EndNodes\n");
    let _ = writeln!(out, "$Elements\n{}", mesh.triangles.len());
    for (i, t) in mesh.triangles.iter().enumerate() {
        let tag = match t.subdomain {
            Subdomain::Elastic => PHYSICAL_ELASTIC,
            Subdomain::Fluid => PHYSICAL_FLUID,
        };
        let [a, b, c] = t.vertices;
        let _ = writeln!(out, "{} 2 2 {tag} {tag} {} {} {}", i + 1, a + 1, b + 1, c + 1);
    }
    out.push_str("$EndElements\n");
    out
}
