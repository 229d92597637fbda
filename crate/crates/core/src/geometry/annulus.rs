use std::f64::consts::PI;

use super::mesh::{signed_area, CurvedBoundary, Mesh, Subdomain, Triangle};
use super::{GeometryError, Point};

/// Structured mesh of an elastic disk of radius `inner_radius` surrounded by a
/// fluid annulus reaching `outer_radius`, both centred at the origin.
///
/// Each subdomain is split into `n_radial` concentric bands. The interface
/// circle carries `n_angular` vertices and every other ring carries a vertex
/// count proportional to its radius (at least 3), so elements stay roughly
/// the same size everywhere. Neighbouring rings are stitched by angle; when
/// two rings have equal counts this is the usual quad-split-in-two pattern.
pub fn build_annulus_mesh(
    inner_radius: f64,
    outer_radius: f64,
    n_radial: usize,
    n_angular: usize,
) -> Result<Mesh, GeometryError> {
    if !(inner_radius > 0.0) || !(outer_radius > inner_radius) {
        return Err(GeometryError::InvalidParameters(format!(
            "radii must satisfy R > R0 > 0 (got R0 = {inner_radius}, R = {outer_radius})"
        )));
    }
    if n_radial < 1 || n_angular < 8 {
        return Err(GeometryError::InvalidParameters(format!(
            "need n_radial >= 1 and n_angular >= 8 (got {n_radial}, {n_angular})"
        )));
    }

    let mut vertices: Vec<Point> = vec![[0.0, 0.0]];
    let mut rings: Vec<Vec<usize>> = vec![vec![0]];
    let mut ring_radius = vec![0.0];

    let push_ring = |radius: f64, count: usize, vertices: &mut Vec<Point>| -> Vec<usize> {
        (0..count)
            .map(|i| {
                let theta = 2.0 * PI * i as f64 / count as f64;
                vertices.push([radius * theta.cos(), radius * theta.sin()]);
                vertices.len() - 1
            })
            .collect()
    };

    let count_at = |radius: f64| -> usize {
        ((n_angular as f64 * radius / inner_radius).round() as usize).max(3)
    };

    for j in 1..=n_radial {
        let r = inner_radius * j as f64 / n_radial as f64;
        let count = if j == n_radial { n_angular } else { count_at(r) };
        rings.push(push_ring(r, count, &mut vertices));
        ring_radius.push(r);
    }
    let interface_ring = rings.len() - 1;
    for i in 1..=n_radial {
        let r = inner_radius + (outer_radius - inner_radius) * i as f64 / n_radial as f64;
        rings.push(push_ring(r, count_at(r), &mut vertices));
        ring_radius.push(r);
    }

    let mut triangles = Vec::new();
    for band in 0..rings.len() - 1 {
        let subdomain = if band < interface_ring {
            Subdomain::Elastic
        } else {
            Subdomain::Fluid
        };
        stitch(&vertices, &rings[band], &rings[band + 1], subdomain, &mut triangles)?;
    }

    Mesh::new(
        vertices,
        triangles,
        CurvedBoundary {
            center: [0.0, 0.0],
            interface_radius: Some(inner_radius),
            outer_radius: Some(outer_radius),
        },
    )
}

fn angle_of(p: Point) -> f64 {
    let a = p[1].atan2(p[0]);
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Triangulate the band between an inner and an outer ring by sweeping in angle.
fn stitch(
    vertices: &[Point],
    inner: &[usize],
    outer: &[usize],
    subdomain: Subdomain,
    triangles: &mut Vec<Triangle>,
) -> Result<(), GeometryError> {
    let mut emit = |a: usize, b: usize, c: usize| -> Result<(), GeometryError> {
        let area = signed_area(vertices[a], vertices[b], vertices[c]);
        let tri = if area > 0.0 { [a, b, c] } else { [a, c, b] };
        let area = area.abs();
        if area < 1e-14 {
            return Err(GeometryError::DegenerateElement { element: triangles.len(), area });
        }
        triangles.push(Triangle { vertices: tri, subdomain });
        Ok(())
    };

    if inner.len() == 1 {
        for j in 0..outer.len() {
            emit(inner[0], outer[j], outer[(j + 1) % outer.len()])?;
        }
        return Ok(());
    }

    // Angle of the next vertex along a ring; the wrap-around closes at 2π.
    let next_angle = |ring: &[usize], i: usize| -> f64 {
        if i + 1 == ring.len() {
            2.0 * PI
        } else {
            angle_of(vertices[ring[i + 1]])
        }
    };
    let (p, q) = (inner.len(), outer.len());
    let (mut i, mut j) = (0, 0);
    while i < p || j < q {
        let advance_inner = if i == p {
            false
        } else if j == q {
            true
        } else {
            next_angle(inner, i) <= next_angle(outer, j)
        };
        if advance_inner {
            emit(inner[i], inner[(i + 1) % p], outer[j % q])?;
            i += 1;
        } else {
            emit(inner[i % p], outer[j], outer[(j + 1) % q])?;
            j += 1;
        }
    }
    Ok(())
}
