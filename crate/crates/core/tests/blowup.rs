use std::sync::Arc;

use inls_core::dynamics::*;
use inls_core::model::ModelParams;
use inls_core::radial::{energy, GridMap, RadialField, RadialGrid, VirialWeight};

#[test]
fn negative_energy_mass_critical_data_blows_up() {
    let p = ModelParams::focusing(3, 0.5, 0.5, 1.0).unwrap();
    let g = Arc::new(
        RadialGrid::new(
            3,
            2048,
            15.0,
            GridMap::Clustered {
                kappa: 200.0,
                ell: 0.5,
            },
        )
        .unwrap(),
    );
    let u0 = RadialField::regular_gaussian(g, p.a, 6.0, 1.0);
    let e0 = energy(&u0, &p).unwrap();
    assert!(e0 < 0.0);
    let cfg = EvolutionConfig {
        dt: 2e-3,
        t_end: 5.0,
        snapshot_every: 20,
        keep_states: true,
        ..Default::default()
    };
    let run = evolve(&u0, &p, &cfg).unwrap();
    assert_eq!(run.status, Status::BlowupDetected);
    let t_star = run.t_star.unwrap();
    assert!(t_star > 0.5 && t_star < 3.0, "{t_star}");
    // the quadratic virial V'' = 16 E < 0 throughout, up to the energy error
    for r in &run.trajectory {
        assert!(r.vpp < 0.0, "t = {}: {}", r.t, r.vpp);
    }
    let (r, _) = smallest_valid_radius(
        &run.states,
        &p,
        &[1.0, 2.0, 4.0],
        VirialWeight::TruncatedCritical,
        15.0 * e0,
        0.05,
    )
    .unwrap();
    assert!(r.is_some());
    assert!(scattering_diagnostic(&run, &p).is_err());
}
