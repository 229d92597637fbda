use fsidg::config::{GeometryConfig, InitialConfig, SimulationConfig, StepRule, WaveConfig};
use fsidg::experiment::convergence_study;

// Smooth initial data, no incident wave, a step well below the explicit
// stability limit. The errors against the finest level should decay at
// the optimal rates once the mesh resolves the bump.
#[test]
fn smooth_bump_converges_at_optimal_rates() {
    let cfg = SimulationConfig {
        geometry: GeometryConfig::Annulus { inner_radius: 1.0, outer_radius: 2.0, n_radial: 2, n_angular: 16 },
        wave: WaveConfig::Zero,
        initial: InitialConfig::Bump { center: [1.5, 0.0], width: 0.3, amplitude: 1.0 },
        step: StepRule::MeshFraction(1.0 / 50.0),
        final_time: 1.0,
        ..Default::default()
    };
    let report = convergence_study(&cfg, 3).unwrap();
    println!("{}", report.table());
    let e = report.final_energy_order().unwrap();
    let l2 = report.final_l2_order().unwrap();
    assert!((0.8..=1.4).contains(&e), "energy order {e}");
    assert!((1.5..=2.3).contains(&l2), "L2 order {l2}");
    for w in report.records.windows(2) {
        assert!(w[1].energy_error < w[0].energy_error);
        assert!(w[1].l2_error < w[0].l2_error);
    }
}
