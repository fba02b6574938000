//! Acceptance suite: one test per acceptance criterion, each printing a
//! PASS line with the measured quantities. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use glacial_cycles::experiments::{
    cmd_equilibria, cmd_orbit, cmd_sweep_b0, ConfigBuilder, RunConfig, SweepOutcome,
};
use glacial_cycles::integrator::IntegratorConfig;
use glacial_cycles::model::{
    classify_boundary_point, epsilon_bound, find_equilibria, four_ode_rhs, invariant_line_coords,
    jacobian, sigma_normal, switching_function, switching_ice_line, tangency_curve,
    tangency_intersection_eta, vector_field, w_nullcline, BoundaryClass, Classification,
    ModelParameters, Regime, Stability, State,
};
use glacial_cycles::section::{SectionContext, SectionMapChoice, SectionNorm, SectionRegion};
use glacial_cycles::SectionPoint;

fn config_with(out: &std::path::Path, sets: &[(&str, &str)]) -> RunConfig {
    let mut b = ConfigBuilder::default();
    for (k, v) in sets {
        b.set(k, v).unwrap();
    }
    let mut cfg = b.build().unwrap();
    cfg.out_dir = out.to_path_buf();
    cfg
}

fn dot(n: &[f64; 3], v: &[f64; 3]) -> f64 {
    n[0] * v[0] + n[1] * v[1] + n[2] * v[2]
}

#[test]
fn criterion_01_equilibrium_regression() {
    let dir = tempfile::tempdir().unwrap();
    let started = Instant::now();
    let report = cmd_equilibria(&config_with(dir.path(), &[])).unwrap();
    let elapsed = started.elapsed();

    let retreat: Vec<_> = report
        .equilibria
        .iter()
        .filter(|e| e.regime == Regime::Retreat)
        .collect();
    let sink = retreat.iter().find(|e| e.stability == Stability::Sink).unwrap();
    let saddle = retreat.iter().find(|e| e.stability == Stability::Saddle).unwrap();
    assert!((sink.state.w - 5.08).abs() <= 0.05, "sink w = {}", sink.state.w);
    assert!((sink.state.eta - 0.95).abs() <= 0.05);
    assert!((saddle.state.w - (-17.26)).abs() <= 0.05, "saddle w = {}", saddle.state.w);
    assert!((saddle.state.eta - 0.25).abs() <= 0.05);
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "criterion 01 equilibrium regression: PASS — retreat sink ({:.4}, {:.4}), saddle ({:.4}, {:.4}) in {:?}",
        sink.state.w, sink.state.eta, saddle.state.w, saddle.state.eta, elapsed
    );
}

#[test]
fn criterion_02_virtuality() {
    let p = ModelParameters::standard();
    let mut sinks = 0;
    for regime in [Regime::Retreat, Regime::Advance] {
        for report in find_equilibria(regime, &p).unwrap() {
            if report.stability == Stability::Sink {
                sinks += 1;
                assert_eq!(
                    report.classification,
                    Classification::Virtual,
                    "{regime:?} sink must be virtual"
                );
                let h = switching_function(&report.state, &p);
                assert!(h.abs() > 1e-9, "sink sits on the plane: |h| = {h:e}");
            }
        }
    }
    assert_eq!(sinks, 2);
    println!("criterion 02 virtuality: PASS — both regime sinks classify as virtual");
}

#[test]
fn criterion_03_periodic_orbit_existence() {
    for eps in ["0.003", "0.03", "0.3"] {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config_with(dir.path(), &[("params.epsilon", eps)]);
        let started = Instant::now();
        let summary = cmd_orbit(&cfg).unwrap();
        assert!(
            summary.orbit.closure_error < 1e-8,
            "eps = {eps}: closure = {}",
            summary.orbit.closure_error
        );
        assert_eq!(
            summary.crossings_per_period, 2,
            "eps = {eps}: crossings = {}",
            summary.crossings_per_period
        );

        // Five random admissible seeds must agree on the fixed point.
        let ctx = SectionContext::new(cfg.params, cfg.integrator).unwrap();
        let z = summary.seed;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut fixed_points = Vec::new();
        let mut draws = 0;
        while fixed_points.len() < 5 && draws < 400 {
            draws += 1;
            let candidate = SectionPoint::new(
                z.w - rng.random_range(0.0..2.0),
                z.eta + rng.random_range(-0.02..0.004),
            );
            if !ctx.is_admissible(&candidate, SectionMapChoice::Minus) {
                continue;
            }
            let orbit = ctx
                .find_orbit(&candidate, Default::default())
                .unwrap_or_else(|e| panic!("eps = {eps}, seed {candidate:?}: {e}"));
            fixed_points.push(orbit.fixed_point);
        }
        assert_eq!(fixed_points.len(), 5, "not enough admissible seeds");
        for fp in &fixed_points[1..] {
            let d = fp.distance(&fixed_points[0], &cfg.params);
            assert!(d < 1e-8, "eps = {eps}: fixed points differ by {d:e}");
        }
        let elapsed = started.elapsed();
        assert!(elapsed.as_secs_f64() < 30.0, "eps = {eps} took {elapsed:?}");
        println!(
            "criterion 03 orbit at eps = {eps}: PASS — period {:.4}, closure {:.2e}, 2 crossings, 5 seeds agree, {:?}",
            summary.orbit.period, summary.orbit.closure_error, elapsed
        );
    }
}

#[test]
fn criterion_04_epsilon_threshold() {
    let p = ModelParameters::standard();
    let bound = epsilon_bound(&p);
    assert!(
        (bound - 0.34285714285714286).abs() < 1e-12,
        "bound = {bound:.15}"
    );
    let above = ModelParameters {
        epsilon: 0.35,
        ..p
    };
    let eta = tangency_intersection_eta(&above);
    assert!(above.epsilon >= bound, "0.35 must be inadmissible");
    assert!(eta > 0.0 && eta < 1.0, "eta(0.35) = {eta}");
    println!(
        "criterion 04 epsilon threshold: PASS — bound = {bound:.12}, eta(0.35) = {eta:.6}"
    );
}

#[test]
fn criterion_05_tangency_geometry() {
    let p = ModelParameters::standard();
    let n = sigma_normal(&p);
    let mut worst: f64 = 0.0;
    for regime in [Regime::Advance, Regime::Retreat] {
        for i in 0..=1000 {
            let eta = i as f64 / 1000.0;
            let g = tangency_curve(eta, regime, &p);
            let xi = switching_ice_line(eta, &p);
            let on_curve = dot(&n, &vector_field(&State::new(g, eta, xi), regime, &p));
            worst = worst.max(on_curve.abs());
            assert!(on_curve.abs() < 1e-10, "{regime:?} eta = {eta}: {on_curve:e}");
            let above = dot(&n, &vector_field(&State::new(g + 1e-4, eta, xi), regime, &p));
            let below = dot(&n, &vector_field(&State::new(g - 1e-4, eta, xi), regime, &p));
            assert!(above > 0.0 && below < 0.0, "{regime:?} eta = {eta}: no sign flip");
        }
    }
    println!("criterion 05 tangency geometry: PASS — max |V.N| on curves = {worst:.2e}");
}

#[test]
fn criterion_06_jacobian_correctness() {
    let p = ModelParameters::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for regime in [Regime::Advance, Regime::Retreat] {
        for _ in 0..100 {
            let s = State::new(
                rng.random_range(-30.0..15.0),
                rng.random_range(0.0..1.0),
                rng.random_range(0.0..1.0),
            );
            let analytic = jacobian(&s, regime, &p);
            for col in 0..3 {
                let h = 1e-6 * s.to_array()[col].abs().max(1.0);
                let mut plus = s.to_array();
                let mut minus = s.to_array();
                plus[col] += h;
                minus[col] -= h;
                let f_plus = vector_field(&State::from_array(plus), regime, &p);
                let f_minus = vector_field(&State::from_array(minus), regime, &p);
                for row in 0..3 {
                    let fd = (f_plus[row] - f_minus[row]) / (2.0 * h);
                    let rel = (fd - analytic[row][col]).abs()
                        / analytic[row][col].abs().max(1.0);
                    worst = worst.max(rel);
                    assert!(rel < 1e-6, "J[{row}][{col}] {regime:?}: rel = {rel:e}");
                }
            }
            // The slow direction is an exact eigenpair.
            assert_eq!(analytic[2][2], -p.epsilon * regime.ablation(&p));
            assert_eq!(analytic[0][2], 0.0);
            assert_eq!(analytic[1][2], 0.0);
        }
    }
    println!("criterion 06 jacobian: PASS — max relative defect vs central differences = {worst:.2e}");
}

#[test]
fn criterion_07_four_ode_oracle() {
    let p = ModelParameters::standard();
    let (z0_star, w2_star, z2_star) = invariant_line_coords(&p);
    let tol = 10.0 * IntegratorConfig::default().rel_tol.max(1e-9);

    let rk4 = |coords: [f64; 4], eta: f64, dt: f64| {
        let add = |c: [f64; 4], k: [f64; 4], s: f64| {
            [c[0] + s * k[0], c[1] + s * k[1], c[2] + s * k[2], c[3] + s * k[3]]
        };
        let k1 = four_ode_rhs(coords, eta, &p);
        let k2 = four_ode_rhs(add(coords, k1, 0.5 * dt), eta, &p);
        let k3 = four_ode_rhs(add(coords, k2, 0.5 * dt), eta, &p);
        let k4 = four_ode_rhs(add(coords, k3, dt), eta, &p);
        let mut out = coords;
        for i in 0..4 {
            out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out
    };

    let mut worst_line: f64 = 0.0;
    let mut worst_rate: f64 = 0.0;
    for i in 0..10 {
        let eta = 0.05 + 0.1 * i as f64;
        let mut coords = [(i as f64) - 4.0, z0_star + 8.0, w2_star - 6.0, z2_star + 3.0];
        let dt = 1e-3;
        for _ in 0..((20.0 / dt) as usize) {
            coords = rk4(coords, eta, dt);
        }
        for (got, want) in coords[1..].iter().zip([z0_star, w2_star, z2_star]) {
            worst_line = worst_line.max((got - want).abs());
            assert!((got - want).abs() < tol, "eta = {eta}: {got} vs {want}");
        }
        // On the line the mean-temperature equation collapses to the
        // relaxation toward the w-nullcline.
        let rates = four_ode_rhs(coords, eta, &p);
        let expected = -p.tau * (coords[0] - w_nullcline(eta, &p));
        worst_rate = worst_rate.max((rates[0] - expected).abs());
        assert!((rates[0] - expected).abs() < tol, "eta = {eta}");
    }
    println!(
        "criterion 07 reduction oracle: PASS — line defect {worst_line:.2e}, rate defect {worst_rate:.2e}"
    );
}

#[test]
fn criterion_08_contraction_property() {
    for eps in [0.003, 0.03] {
        let p = ModelParameters {
            epsilon: eps,
            ..ModelParameters::standard()
        };
        let ctx = SectionContext::new(p, IntegratorConfig::default()).unwrap();
        let planar = glacial_cycles::model::find_planar_equilibria(Regime::Retreat, &p);
        let sink = planar.iter().find(|e| e.stability == Stability::Sink).unwrap();
        let orbit = ctx
            .find_orbit(&SectionPoint::new(sink.w, sink.eta), Default::default())
            .unwrap();
        let region = SectionRegion::centered(&orbit.fixed_point, 0.1, 0.1);
        let estimate = ctx
            .estimate_contraction(
                &region,
                SectionMapChoice::Minus,
                200,
                SectionNorm::SigmaEmbedded,
                4242,
            )
            .unwrap();
        assert!(
            estimate.factor < 1.0,
            "eps = {eps}: factor = {}",
            estimate.factor
        );
        println!(
            "criterion 08 contraction at eps = {eps}: PASS — factor {:.3e} over {} pairs ({} excluded)",
            estimate.factor, estimate.pairs_used, estimate.pairs_excluded
        );
    }
}

#[test]
fn criterion_09_boundary_equilibrium_bifurcation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_with(dir.path(), &[]);
    let started = Instant::now();
    let report = cmd_sweep_b0(&cfg).unwrap();
    let elapsed = started.elapsed();
    assert_eq!(report.records.len(), 51);

    let at = |b0: f64| {
        report
            .records
            .iter()
            .find(|r| (r.b0 - b0).abs() < 1e-9)
            .unwrap_or_else(|| panic!("no record at b0 = {b0}"))
    };
    assert_eq!(at(1.5).outcome, SweepOutcome::LimitCycle);
    assert!(at(1.5).orbit.is_some());
    let boundary_near = report
        .records
        .iter()
        .any(|r| r.outcome == SweepOutcome::BoundaryEquilibrium && (r.b0 - 1.75).abs() <= 0.02 + 1e-9);
    assert!(boundary_near, "no boundary outcome within one step of 1.75");
    let far = at(2.5);
    assert_eq!(far.outcome, SweepOutcome::RegularSinkAdvance);
    assert!(far.orbit.is_none(), "orbit should be absent at b0 = 2.5");
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!(
        "criterion 09 bifurcation sweep: PASS — {} blocks {:?}, contiguous = {}, {:?}",
        report.blocks.len(),
        report
            .blocks
            .iter()
            .map(|b| b.outcome.label())
            .collect::<Vec<_>>(),
        report.contiguous,
        elapsed
    );
}

#[test]
fn criterion_10_integrator_order() {
    use glacial_cycles::integrator::{smooth_step, StepMode};
    let p = ModelParameters::standard();
    let cfg = IntegratorConfig {
        step_mode: StepMode::FixedClassicalRk4,
        base_step: 1e-4,
        ..IntegratorConfig::default()
    };

    // Global Richardson order on the smooth retreat field against a
    // fine-step reference over a fixed window.
    let s0 = State::new(2.0, 0.8, 0.5);
    let t_end = 1.0;
    let integrate = |dt: f64| {
        let mut s = s0;
        let steps = (t_end / dt).round() as usize;
        for _ in 0..steps {
            s = smooth_step(&s, Regime::Retreat, dt, &p, &cfg).unwrap();
        }
        s
    };
    let reference = integrate(1e-4);
    let mut points = Vec::new();
    for &dt in &[0.05, 0.025, 0.0125, 0.00625] {
        let err = integrate(dt).distance(&reference);
        points.push((dt.ln(), err.ln()));
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|(x, _)| x).sum();
    let sy: f64 = points.iter().map(|(_, y)| y).sum();
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!(slope >= 3.9, "observed order {slope}");

    // Linear ice-line equation against its closed form.
    let planar = glacial_cycles::model::find_planar_equilibria(Regime::Retreat, &p);
    let sink = planar.iter().find(|e| e.stability == Stability::Sink).unwrap();
    let xi_eq = sink.eta + (p.accum / p.b1) * (sink.eta - 1.0);
    let xi0 = 0.99;
    let mut s = State::new(sink.w, sink.eta, xi0);
    let dt = 1e-3;
    let horizon = 5.0;
    let fixed = IntegratorConfig {
        step_mode: StepMode::FixedClassicalRk4,
        base_step: dt,
        ..IntegratorConfig::default()
    };
    for _ in 0..((horizon / dt) as usize) {
        s = smooth_step(&s, Regime::Retreat, dt, &p, &fixed).unwrap();
    }
    let closed_form = xi_eq + (xi0 - xi_eq) * (-p.epsilon * p.b1 * horizon).exp();
    let defect = (s.xi - closed_form).abs();
    assert!(defect < 1e-8, "xi defect = {defect:e}");
    println!(
        "criterion 10 integrator order: PASS — observed order {slope:.3}, linear-xi defect {defect:.2e}"
    );
}

#[test]
fn criterion_02b_boundary_band_is_exact() {
    // Supporting check for criterion 2's tolerance: a lift within 1e-9 of
    // the plane classifies Boundary, one just outside does not.
    let p = ModelParameters::standard();
    let eta = 0.7;
    let xi = switching_ice_line(eta, &p);
    let mid = 0.5
        * (tangency_curve(eta, Regime::Retreat, &p) + tangency_curve(eta, Regime::Advance, &p));
    let state = State::new(mid, eta, xi);
    assert_eq!(
        classify_boundary_point(&state, &p, 1e-9).unwrap(),
        BoundaryClass::SlidingRepelling
    );
    let off = State::new(mid, eta, xi + 1e-8);
    assert!(classify_boundary_point(&off, &p, 1e-9).is_err());
    println!("criterion 02 tolerance band: PASS");
}
