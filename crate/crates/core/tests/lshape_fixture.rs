use std::collections::HashMap;
use std::path::{Path, PathBuf};

use fsidg::config::{GeometryConfig, SimulationConfig, WaveConfig};
use fsidg::experiment::{base_mesh, mesh_levels};
use fsidg::geometry::{import_msh, parse_msh, write_msh, CurvedBoundary, EdgeKind, Subdomain};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn manifest() -> HashMap<String, String> {
    std::fs::read_to_string(fixture("lshape.manifest"))
        .unwrap()
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

fn boundary() -> CurvedBoundary {
    CurvedBoundary { center: [0.0, 0.0], interface_radius: None, outer_radius: Some(3.0) }
}

#[test]
fn edge_counts_match_manifest() {
    let mesh = import_msh(&fixture("lshape.msh"), boundary()).unwrap();
    let m = manifest();
    let count = |k: &str| m[k].parse::<usize>().unwrap();
    assert_eq!(mesh.count_elements(Subdomain::Elastic), count("elements_elastic"));
    assert_eq!(mesh.count_elements(Subdomain::Fluid), count("elements_fluid"));
    for kind in EdgeKind::ALL.into_iter().chain([EdgeKind::FreeElastic]) {
        assert_eq!(mesh.count_edges(kind), count(kind.name()), "{}", kind.name());
    }
    let h: f64 = m["mesh_size"].parse().unwrap();
    assert!((mesh.mesh_size - h).abs() < 1e-12);
}

#[test]
fn subdomain_areas() {
    let mesh = import_msh(&fixture("lshape.msh"), boundary()).unwrap();
    assert!((mesh.subdomain_area(Subdomain::Elastic) - 3.0).abs() < 1e-12);
    // Inscribed polygon of the radius 3 circle minus the L.
    let n = mesh.count_edges(EdgeKind::Artificial) as f64;
    let polygon = 0.5 * n * 9.0 * (2.0 * std::f64::consts::PI / n).sin();
    assert!((mesh.subdomain_area(Subdomain::Fluid) - (polygon - 3.0)).abs() < 1e-10);
}

#[test]
fn export_round_trip_keeps_counts() {
    let mesh = import_msh(&fixture("lshape.msh"), boundary()).unwrap();
    let again = parse_msh(&write_msh(&mesh), boundary()).unwrap();
    for kind in EdgeKind::ALL {
        assert_eq!(mesh.count_edges(kind), again.count_edges(kind));
    }
    assert_eq!(mesh.vertices, again.vertices);
}

#[test]
fn refinement_keeps_the_corner_and_the_circle() {
    let cfg = SimulationConfig::load(&fixture("example2.cfg")).unwrap();
    assert!(matches!(cfg.geometry, GeometryConfig::Msh { .. }));
    assert!(matches!(cfg.wave, WaveConfig::Pulse { .. }));
    let base = base_mesh(&cfg).unwrap();
    let levels = mesh_levels(&cfg, 2).unwrap();
    let fine = levels.last().unwrap();
    assert_eq!(fine.num_elements(), 16 * base.num_elements());
    assert_eq!(fine.count_edges(EdgeKind::Interface), 4 * base.count_edges(EdgeKind::Interface));
    // The straight interface stays straight, the outer circle is followed.
    assert!((fine.subdomain_area(Subdomain::Elastic) - 3.0).abs() < 1e-12);
    for (_, e) in fine.edges_of_kind(EdgeKind::Artificial) {
        for v in e.vertices {
            let [x, y] = fine.vertices[v];
            assert!((x.hypot(y) - 3.0).abs() < 1e-12);
        }
    }
    let ratio = base.mesh_size / fine.mesh_size;
    assert!(ratio > 3.5 && ratio < 4.5, "{ratio}");
}
