//! Acceptance report: one PASS/FAIL line per check.
//!
//! Exits 0 after printing the report; with `INLS_ACCEPTANCE_STRICT=1` any FAIL makes the exit
//! status nonzero.

use std::sync::Arc;
use std::time::{Duration, Instant};

use inls_core::dynamics::*;
use inls_core::exponents::{verify_with_small_parameters, Construction, Value};
use inls_core::groundstate::*;
use inls_core::model::{ModelParams, Regime, Sign};
use inls_core::radial::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Default)]
struct Report {
    passed: usize,
    failed: usize,
}

impl Report {
    fn check(&mut self, id: &str, ok: bool, detail: impl AsRef<str>) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        println!(
            "{} [{id}] {}",
            if ok { "PASS" } else { "FAIL" },
            detail.as_ref()
        );
    }

    fn info(&self, id: &str, detail: impl AsRef<str>) {
        println!("INFO [{id}] {}", detail.as_ref());
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

const POHOZAEV_CASES: [(u32, f64, f64, f64); 4] = [
    (3, 0.0, 0.0, 2.0),
    (3, 1.0, 0.5, 2.0),
    (4, 0.0, 1.0, 1.2),
    (3, -0.2, 0.3, 2.5),
];

fn unpolished(method: Method) -> SolverOpts {
    SolverOpts {
        polish: false,
        ..SolverOpts::with_method(method)
    }
}

/// Pohozaev residuals, the two ratio identities, and the shooting/flow comparison.
fn ground_states(rep: &mut Report) -> Vec<(ModelParams, GroundState)> {
    let mut solved = Vec::new();
    for (n, a, b, alpha) in POHOZAEV_CASES {
        let id = format!("1 ({n},{a},{b},{alpha})");
        let p = ModelParams::focusing(n, a, b, alpha).unwrap();
        let t = Instant::now();
        let gs = match solve_ground_state(&p, &SolverOpts::default()) {
            Ok(gs) => gs,
            Err(e) => {
                rep.check(&id, false, format!("no ground state: {e}"));
                rep.check(
                    &format!("2 ({n},{a},{b},{alpha})"),
                    false,
                    format!("no ground state: {e}"),
                );
                if (n, a, b, alpha) == (4, 0.0, 1.0, 1.2) {
                    report_neighbour(rep);
                }
                continue;
            }
        };
        let elapsed = t.elapsed();
        let (r1, r2) = pohozaev_residuals(&gs, &p);
        rep.check(
            &id,
            r1 < 1e-6 && r2 < 1e-6 && elapsed < Duration::from_secs(30),
            format!(
                "Pohozaev residuals {r1:.2e}, {r2:.2e} (< 1e-6), M = {} points, {:.1} s (< 30 s)",
                gs.profile.len(),
                secs(elapsed)
            ),
        );
        if (n, a, b, alpha) == (3, 0.0, 0.0, 2.0) {
            let k_ratio = gs.kinetic / gs.mass;
            let p_ratio = gs.potential / gs.mass;
            rep.check(
                "1 ratio K/M",
                (k_ratio - 3.0).abs() < 1e-4,
                format!("||grad Q||^2 / ||Q||^2 = {k_ratio:.8} (3 within 1e-4)"),
            );
            rep.check(
                "1 ratio P/M",
                (p_ratio - 4.0).abs() < 1e-4,
                format!("int Q^4 / ||Q||^2 = {p_ratio:.8} (4 within 1e-4)"),
            );
        }
        two_solvers(rep, &p, &format!("2 ({n},{a},{b},{alpha})"));
        solved.push((p, gs));
    }
    solved
}

fn two_solvers(rep: &mut Report, p: &ModelParams, id: &str) {
    let t = Instant::now();
    let shot = solve_ground_state(p, &unpolished(Method::Shooting)).unwrap();
    let flow = solve_ground_state(p, &unpolished(Method::GradientFlow)).unwrap();
    let s = shot.scheme().unwrap();
    let d = s.to_v(&shot.profile.sub(&flow.profile).unwrap());
    let rel = s.h1a_norm_v(&d) / flow.h1a_norm();
    rep.check(
        id,
        rel < 1e-5,
        format!(
            "shooting vs gradient flow, relative H^1_a difference {rel:.2e} (< 1e-5), {:.1} s",
            secs(t.elapsed())
        ),
    );
}

/// (4, 0, 1, 1.2) is energy-supercritical; report the closest admissible power instead.
fn report_neighbour(rep: &Report) {
    let p = ModelParams::focusing(4, 0.0, 1.0, 0.9).unwrap();
    match solve_ground_state(&p, &SolverOpts::default()) {
        Ok(gs) => {
            let (r1, r2) = pohozaev_residuals(&gs, &p);
            rep.info(
                "1 (4,0,1,0.9)",
                format!("neighbouring admissible case: Pohozaev residuals {r1:.2e}, {r2:.2e}"),
            );
        }
        Err(e) => rep.info("1 (4,0,1,0.9)", format!("neighbouring case failed: {e}")),
    }
}

/// Random smooth radial fields against the ground state on the same grid.
fn sharpness(rep: &mut Report, solved: &[(ModelParams, GroundState)]) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for (p, gs) in solved {
        let id = format!("3 ({},{},{},{})", p.dim, p.a, p.b, p.alpha);
        let s = gs.scheme().unwrap();
        let r = s.grid().r().to_vec();
        let q = s.to_v(&gs.profile);
        let j_q = gs.weinstein();
        let (big_a, big_b) = (p.pohozaev_a(), p.pohozaev_b());
        let mut min_ratio = f64::INFINITY;
        let mut gn_violations = 0;
        for k in 0..1000 {
            // smooth in the regular variable: a few Gaussians, or Q with a smooth relative bump
            let v: Vec<Complex64> = if k % 2 == 0 {
                let terms: Vec<(f64, f64)> = (0..rng.random_range(1..=3))
                    .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(0.3..3.0)))
                    .collect();
                r.iter()
                    .map(|&x| {
                        Complex64::new(
                            terms
                                .iter()
                                .map(|(c, w)| c * (-x * x / (2.0 * w * w)).exp())
                                .sum(),
                            0.0,
                        )
                    })
                    .collect()
            } else {
                let eps = 10f64.powf(rng.random_range(-3.0..-1.0));
                let (c, w, phase) = (
                    rng.random_range(0.0..3.0),
                    rng.random_range(0.5..3.0),
                    rng.random_range(0.0..1.0),
                );
                q.iter()
                    .zip(&r)
                    .map(|(qj, &x)| {
                        qj * (1.0
                            + eps
                                * Complex64::from_polar(1.0, phase)
                                * (-(x - c).powi(2) / (2.0 * w * w)).exp())
                    })
                    .collect()
            };
            let (m, kin, pot) = (s.mass_v(&v), s.kinetic_v(&v), s.potential_v(&v));
            min_ratio = min_ratio.min(weinstein_from_parts(p, m, kin, pot) / j_q);
            let gn_rhs = gs.sharp_constant * m.powf(big_a / 4.0) * kin.powf(big_b / 4.0);
            if pot > gn_rhs * (1.0 + 1e-12) {
                gn_violations += 1;
            }
        }
        rep.check(
            &id,
            min_ratio >= 1.0 - 1e-6,
            format!("min J_a(f) / J_a(Q) over 1000 fields = {min_ratio:.9} (>= 1 - 1e-6)"),
        );
        rep.check(
            &id,
            gn_violations == 0,
            format!("Gagliardo-Nirenberg with C_a = 1/J_a(Q): {gn_violations} violations in 1000"),
        );
    }
}

fn drift(run: &Evolution) -> (f64, f64) {
    let (a, b) = (
        run.trajectory.first().unwrap(),
        run.trajectory.last().unwrap(),
    );
    (
        (b.mass - a.mass).abs() / a.mass,
        (b.energy - a.energy).abs() / a.energy.abs(),
    )
}

fn conservation(rep: &mut Report) {
    let p = ModelParams::new(3, 0.5, 0.5, 2.0, Sign::Defocusing).unwrap();
    let g = Arc::new(RadialGrid::default_for(3).unwrap());
    let run_with = |u0: &RadialField, dt: f64| {
        let cfg = EvolutionConfig {
            dt,
            t_end: 1.0,
            adapt: false,
            ..Default::default()
        };
        let t = Instant::now();
        let run = evolve(u0, &p, &cfg).unwrap();
        (run, t.elapsed())
    };
    let u0 = RadialField::regular_gaussian(g.clone(), p.a, 0.2, 1.0);
    let (run, elapsed) = run_with(&u0, 1e-3);
    let (dm, de) = drift(&run);
    rep.check(
        "4 mass",
        run.status == Status::ReachedTEnd && dm < 1e-10,
        format!("regular Gaussian A = 0.2, dt = 1e-3, T = 1: relative mass drift {dm:.2e} (< 1e-10), {:.1} s", secs(elapsed)),
    );
    rep.check(
        "4 energy",
        de < 1e-8,
        format!("relative energy drift {de:.2e} (< 1e-8)"),
    );
    let (half, elapsed_half) = run_with(&u0, 5e-4);
    let (_, de2) = drift(&half);
    rep.check(
        "4 order",
        de / de2 >= 3.5 && elapsed + elapsed_half < Duration::from_secs(60),
        format!(
            "energy drift ratio dt -> dt/2: {:.2} (>= 3.5), both runs {:.1} s (< 60 s)",
            de / de2,
            secs(elapsed + elapsed_half)
        ),
    );
    let raw = RadialField::gaussian(g, 1.0, 1.0);
    let (_, de_raw) = drift(&run_with(&raw, 1e-3).0);
    let (_, de_raw2) = drift(&run_with(&raw, 5e-4).0);
    rep.info("4 raw", format!("exp(-r^2/2) (not in the operator domain for a != 0): energy drift {de_raw:.2e}, ratio {:.2}", de_raw / de_raw2));
}

fn clustered(points: usize, r_max: f64, kappa: f64) -> Arc<RadialGrid> {
    Arc::new(RadialGrid::new(3, points, r_max, GridMap::Clustered { kappa, ell: 0.5 }).unwrap())
}

fn virial(rep: &mut Report) {
    let g = clustered(4096, 30.0, 50.0);
    let cfg = EvolutionConfig {
        dt: 1e-3,
        t_end: 1.0,
        snapshot_every: 10,
        ..Default::default()
    };

    let mc = ModelParams::focusing(3, 0.5, 0.5, 1.0).unwrap();
    let run = evolve(
        &RadialField::regular_gaussian(g.clone(), mc.a, 1.0, 1.0),
        &mc,
        &cfg,
    )
    .unwrap();
    match virial_audit(&run.trajectory, &run.weight, &mc) {
        Ok(a) => rep.check(
            "5 mass-critical",
            a.fd_vs_16e.is_some_and(|x| x < 0.02),
            format!(
                "(3,0.5,0.5,1): |d2V/dt2 - 16E| / |16E| = {:.2e} (< 2%), 16E = {:.4}, {} samples",
                a.fd_vs_16e.unwrap_or(f64::NAN),
                a.target_16e.unwrap_or(f64::NAN),
                a.samples
            ),
        ),
        Err(e) => rep.check("5 mass-critical", false, e.to_string()),
    }

    let ic = ModelParams::focusing(3, 1.0, 0.5, 2.0).unwrap();
    let run = evolve(&RadialField::regular_gaussian(g, ic.a, 1.0, 1.0), &ic, &cfg).unwrap();
    match virial_audit(&run.trajectory, &run.weight, &ic) {
        Ok(a) => rep.check(
            "5 intercritical",
            a.fd_vs_identity < 0.02,
            format!("(3,1,0.5,2): d2V/dt2 vs 8K - 4(N alpha + 2b)/(alpha+2) P, relative {:.2e} (< 2%); recorded V'' {:.2e}", a.fd_vs_identity, a.recorded_vs_identity),
        ),
        Err(e) => rep.check("5 intercritical", false, e.to_string()),
    }
}

fn dichotomy(rep: &mut Report, solved: &[(ModelParams, GroundState)]) {
    let limit = Duration::from_secs(300);

    // (i) below the ground-state mass
    let mc = ModelParams::focusing(3, 0.5, 0.5, 1.0).unwrap();
    let gs = solve_ground_state(&mc, &SolverOpts::default()).unwrap();
    let th = thresholds(&gs, &mc).unwrap();
    let u0 = gs.profile.scaled_re(0.5);
    let pred = classify_initial_data(&u0, &th, &mc).unwrap();
    let t = Instant::now();
    let cfg = EvolutionConfig {
        dt: 1e-3,
        t_end: 10.0,
        snapshot_every: 100,
        ..Default::default()
    };
    let run = evolve(&u0, &mc, &cfg).unwrap();
    let elapsed = t.elapsed();
    let h0 = run.trajectory[0].h1a;
    let growth = run.trajectory.iter().map(|r| r.h1a).fold(0.0, f64::max) / h0 - 1.0;
    rep.check(
        "6(i)",
        run.status == Status::ReachedTEnd && growth < 0.1 && elapsed < limit,
        format!("0.5 Q, (3,0.5,0.5,1): {} at T = 10, prediction {pred:?}, max H^1_a growth {:.2}% (< 10%), {:.1} s", run.status.as_str(), 100.0 * growth, secs(elapsed)),
    );

    // (ii) negative energy, mass-critical
    let g = clustered(8192, 20.0, 200.0);
    let u0 = RadialField::regular_gaussian(g, mc.a, 6.0, 1.0);
    let e0 = energy(&u0, &mc).unwrap();
    let pred = classify_initial_data(&u0, &th, &mc).unwrap();
    let t = Instant::now();
    let cfg = EvolutionConfig {
        dt: 1e-3,
        t_end: 5.0,
        snapshot_every: 20,
        keep_states: true,
        ..Default::default()
    };
    let run = evolve(&u0, &mc, &cfg).unwrap();
    let elapsed = t.elapsed();
    rep.check(
        "6(ii) blow-up",
        e0 < 0.0 && run.status == Status::BlowupDetected && elapsed < limit,
        format!(
            "E[u0] = {e0:.4}, prediction {pred:?}: {} at t* = {:.4}, {:.1} s",
            run.status.as_str(),
            run.t_star.unwrap_or(f64::NAN),
            secs(elapsed)
        ),
    );
    let radii = [1.0, 2.0, 3.0, 4.0, 6.0, 8.0];
    let (r, checks) = smallest_valid_radius(
        &run.states,
        &mc,
        &radii,
        VirialWeight::TruncatedCritical,
        15.0 * e0,
        0.05,
    )
    .unwrap();
    let detail = checks
        .iter()
        .map(|c| format!("{:.1}", c.max_vpp))
        .collect::<Vec<_>>()
        .join(", ");
    rep.check(
        "6(ii) truncated virial",
        r.is_some(),
        format!("smallest R in {radii:?} with max V''_R <= 15E + 5%: {r:?} (15E = {:.2}; max V''_R tried: {detail})", 15.0 * e0),
    );
    drop(run);

    // (iii) intercritical, above the gradient threshold
    let (ic, gs) = solved
        .iter()
        .find(|(p, _)| (p.a, p.b, p.alpha) == (1.0, 0.5, 2.0))
        .expect("(3,1,0.5,2) ground state");
    let th = thresholds(gs, ic).unwrap();
    let u0 = gs.profile.scaled_re(1.1);
    let pred = classify_initial_data(&u0, &th, ic).unwrap();
    let d = RadialScheme::for_field(&u0, ic).unwrap();
    let me = th.me_of(d.mass(&u0), d.energy(&u0)).unwrap();
    let level = th.me_level.unwrap();
    let delta0 = 0.99 * (1.0 - me / level);
    let gap = coercivity_gap(&u0, &th, ic, delta0).unwrap();
    let t = Instant::now();
    let cfg = EvolutionConfig {
        dt: 1e-3,
        t_end: 5.0,
        snapshot_every: 20,
        keep_states: true,
        ..Default::default()
    };
    let run = evolve(&u0, ic, &cfg).unwrap();
    let elapsed = t.elapsed();
    rep.check(
        "6(iii) blow-up",
        pred == Prediction::BlowupAboveThreshold && gap.side == Side::Above && run.status == Status::BlowupDetected && elapsed < limit,
        format!(
            "1.1 Q, (3,1,0.5,2): prediction {pred:?}, eta = {:.4} (delta0 = {delta0:.4}), {} at t* = {:.4}, {:.1} s",
            gap.eta,
            run.status.as_str(),
            run.t_star.unwrap_or(f64::NAN),
            secs(elapsed)
        ),
    );
    let radii = [1.0, 2.0, 3.0, 4.0, 6.0, 8.0];
    let bound = -7.0 * gap.eta;
    let (r, checks) = smallest_valid_radius(
        &run.states,
        ic,
        &radii,
        VirialWeight::TruncatedIntercritical,
        bound,
        0.05,
    )
    .unwrap();
    let detail = checks
        .iter()
        .map(|c| format!("{:.1}", c.max_vpp))
        .collect::<Vec<_>>()
        .join(", ");
    rep.check(
        "6(iii) truncated virial",
        r.is_some(),
        format!("smallest R in {radii:?} with max V''_R <= -7 eta + 5%: {r:?} (-7 eta = {bound:.3}; max V''_R tried: {detail})"),
    );
}

/// Parameters on a 1e-3 lattice inside the hypotheses of `c`.
fn sample_params(c: Construction, rng: &mut ChaCha8Rng) -> ModelParams {
    let round = |x: f64| (x * 1000.0).round() / 1000.0;
    loop {
        let n: u32 = match c {
            Construction::GlobalThreeD | Construction::NegativeCouplingLowPower => 3,
            _ => rng.random_range(3..=5),
        };
        let nf = n as f64;
        let b = round(rng.random_range(0.0..(nf / 2.0).min(2.0)));
        let (lo, hi) = match c {
            Construction::LocalBelowThreshold => {
                ((2.0 - 2.0 * b) / nf, (2.0 - 2.0 * b) / (nf - 2.0))
            }
            Construction::GlobalThreeD => (((4.0 - 2.0 * b) / 3.0).max(1.0), 4.0 - 2.0 * b),
            Construction::NegativeCouplingLowPower => ((4.0 - 2.0 * b) / 3.0, 2.0 - 2.0 * b),
            _ => (0.0, (4.0 - 2.0 * b) / (nf - 2.0)),
        };
        if hi <= lo {
            continue;
        }
        let alpha = round(rng.random_range(lo..hi));
        let hardy = -(nf - 2.0).powi(2) / 4.0;
        let a = round(rng.random_range(hardy..hardy + 3.0));
        let Ok(p) = ModelParams::focusing(n, a, b, alpha) else {
            continue;
        };
        if inls_core::exponents::construction_hypotheses(c, &p)
            .iter()
            .all(|h| h.holds())
        {
            return p;
        }
    }
}

fn exponents(rep: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let t = Instant::now();
    let start = Value::ratio(1, 1000);
    for c in Construction::ALL {
        let tc = Instant::now();
        let mut failures = Vec::new();
        let mut errors = 0;
        for _ in 0..10_000 {
            let p = sample_params(c, &mut rng);
            match verify_with_small_parameters(c, &p, &start, &start, 30) {
                Ok(r) if r.passed => {}
                Ok(r) => failures.push(format!(
                    "({},{},{},{}): {}",
                    p.dim,
                    p.a,
                    p.b,
                    p.alpha,
                    r.failures()[0].name
                )),
                Err(e) => {
                    errors += 1;
                    if failures.len() < 3 {
                        failures.push(format!("({},{},{},{}): {e}", p.dim, p.a, p.b, p.alpha));
                    }
                }
            }
        }
        let n_fail = failures.len().max(errors);
        rep.check(
            &format!("7 {}", c.name()),
            n_fail == 0,
            format!(
                "10^4 tuples, {n_fail} failures{}, {:.1} s",
                failures
                    .first()
                    .map(|f| format!(", e.g. {f}"))
                    .unwrap_or_default(),
                secs(tc.elapsed())
            ),
        );
    }
    let elapsed = t.elapsed();
    rep.check(
        "7 runtime",
        elapsed < Duration::from_secs(10),
        format!("{:.1} s for all regions (< 10 s)", secs(elapsed)),
    );
}

fn free_gaussian(rep: &mut Report) {
    let g = Arc::new(RadialGrid::default_for(3).unwrap());
    let p = ModelParams::new(3, 0.0, 0.0, 2.0, Sign::Defocusing).unwrap();
    let cfg = EvolutionConfig {
        dt: 2.5e-4,
        t_end: 1.0,
        linear_only: true,
        ..Default::default()
    };
    let run = evolve(&RadialField::gaussian(g.clone(), 1.0, 1.0), &p, &cfg).unwrap();
    let exact = RadialField::from_fn(g, |r| {
        let z = Complex64::new(1.0, 2.0);
        z.powf(-1.5) * (-r * r / (2.0 * z)).exp()
    });
    let err = (mass(&run.final_state.sub(&exact).unwrap()) / mass(&exact)).sqrt();
    rep.check(
        "8 profile",
        err < 1e-6,
        format!("free Gaussian at t = 1 (dt = 2.5e-4): relative L^2 error {err:.2e} (< 1e-6)"),
    );
    rep.check(
        "8 mass",
        run.max_mass_drift < 1e-13,
        format!(
            "largest per-step relative mass drift {:.2e} (< 1e-13)",
            run.max_mass_drift
        ),
    );
}

fn scattering(rep: &mut Report) {
    let p = ModelParams::new(3, 0.5, 0.5, 2.0, Sign::Defocusing).unwrap();
    assert_eq!(
        inls_core::derive_indices(&p).unwrap().regime,
        Regime::Intercritical
    );
    let g = Arc::new(RadialGrid::uniform(3, 8192, 200.0).unwrap());
    let u0 = RadialField::regular_gaussian(g, p.a, 1.0, 1.0);
    let cfg = EvolutionConfig {
        dt: 1e-2,
        t_end: 40.0,
        snapshot_every: 100,
        snapshot_times: vec![5.0, 10.0, 20.0, 40.0],
        ..Default::default()
    };
    let t = Instant::now();
    let run = evolve(&u0, &p, &cfg).unwrap();
    match scattering_diagnostic(&run, &p) {
        Ok(inc) => {
            let decreasing = inc.windows(2).all(|w| w[1].1 < w[0].1);
            let shown = inc
                .iter()
                .map(|(t, x)| format!("{t}: {x:.2e}"))
                .collect::<Vec<_>>()
                .join(", ");
            rep.check(
                "9",
                decreasing && inc.len() == 3,
                format!(
                    "Cauchy increments {shown}; strictly decreasing: {decreasing}, {:.1} s",
                    secs(t.elapsed())
                ),
            );
        }
        Err(e) => rep.check("9", false, e.to_string()),
    }
}

fn main() {
    let mut rep = Report::default();
    let solved = ground_states(&mut rep);
    sharpness(&mut rep, &solved);
    conservation(&mut rep);
    virial(&mut rep);
    dichotomy(&mut rep, &solved);
    exponents(&mut rep);
    free_gaussian(&mut rep);
    scattering(&mut rep);
    println!("acceptance: {} passed, {} failed", rep.passed, rep.failed);
    if rep.failed > 0 && std::env::var("INLS_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
