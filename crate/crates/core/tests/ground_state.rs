use inls_core::groundstate::*;
use inls_core::model::ModelParams;
use inls_core::radial::{energy, RadialField};

fn opts() -> SolverOpts {
    SolverOpts {
        points: 4096,
        r_max: 25.0,
        ..SolverOpts::default()
    }
}

#[test]
fn mass_matches_the_sharp_constant() {
    for (a, b, alpha) in [(0.0, 0.0, 2.0), (0.5, 0.5, 1.5), (1.0, 0.5, 2.0)] {
        let p = ModelParams::focusing(3, a, b, alpha).unwrap();
        let gs = solve_ground_state(&p, &opts()).unwrap();
        let m = mass_from_sharp_constant(&p, gs.sharp_constant);
        assert!(
            (m / gs.mass - 1.0).abs() < 1e-8,
            "{a} {b} {alpha}: {m} vs {}",
            gs.mass
        );
        let quoted = quoted_mass_formula(&p, gs.sharp_constant);
        assert!((quoted / gs.mass - 1.0).abs() > 1e-2);
    }
}

#[test]
fn scaling_normalizes_both_norms() {
    let p = ModelParams::focusing(3, 0.5, 0.5, 2.0).unwrap();
    let gs = solve_ground_state(&p, &opts()).unwrap();
    let s = scaling_report(&gs);
    assert!((s.mu_fit / s.mu_closed - 1.0).abs() < 1e-6);
    assert!((s.lambda_fit / s.lambda_closed - 1.0).abs() < 1e-6);
}

#[test]
fn classification_end_to_end() {
    let p = ModelParams::focusing(3, 0.5, 0.5, 1.0).unwrap();
    let gs = solve_ground_state(&p, &opts()).unwrap();
    let th = thresholds(&gs, &p).unwrap();
    let half = gs.profile.scaled_re(0.5);
    assert_eq!(
        classify_initial_data(&half, &th, &p).unwrap(),
        Prediction::GlobalBelowGroundMass
    );
    assert_eq!(
        classify_initial_data(&gs.profile, &th, &p).unwrap(),
        Prediction::NoPrediction
    );
    let negative = RadialField::regular_gaussian(gs.profile.grid_arc().clone(), p.a, 6.0, 1.0);
    assert!(energy(&negative, &p).unwrap() < 0.0);
    assert_eq!(
        classify_initial_data(&negative, &th, &p).unwrap(),
        Prediction::BlowupNegativeEnergy
    );

    let ic = ModelParams::focusing(3, 1.0, 0.5, 2.0).unwrap();
    let gs = solve_ground_state(&ic, &opts()).unwrap();
    let th = thresholds(&gs, &ic).unwrap();
    assert_eq!(
        classify_initial_data(&gs.profile.scaled_re(0.9), &th, &ic).unwrap(),
        Prediction::GlobalBelowThreshold
    );
    let above = gs.profile.scaled_re(1.1);
    assert_eq!(
        classify_initial_data(&above, &th, &ic).unwrap(),
        Prediction::BlowupAboveThreshold
    );
    let gap = coercivity_gap(&above, &th, &ic, 0.05).unwrap();
    assert_eq!(gap.side, Side::Above);
    assert!(gap.eta > 0.0 && gap.delta > 0.0);
}

#[test]
fn energy_supercritical_power_is_rejected() {
    let p = ModelParams::focusing(4, 0.0, 1.0, 1.2).unwrap();
    assert!(matches!(
        solve_ground_state(&p, &opts()),
        Err(inls_core::Error::HypothesisViolation(_))
    ));
}
