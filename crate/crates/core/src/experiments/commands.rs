//! The experiment commands behind the CLI subcommands. Each command takes a
//! [`RunConfig`], writes its data files under the output directory, and
//! prints a short summary.

use serde::{Deserialize, Serialize};

use crate::integrator::{evolve_hybrid, IntegratorConfig, Termination};
use crate::model::{
    classify_boundary_point, epsilon_bound, eta_nullcline, find_equilibria,
    find_planar_equilibria, switching_function, switching_ice_line, tangency_curve,
    tangency_intersection_eta, w_nullcline, BoundaryClass, EquilibriumReport, ModelParameters,
    Regime, Stability, State,
};
use crate::section::{OrbitResult, SectionContext, SectionPoint};

use super::config::RunConfig;
use super::output::{
    format_float, write_events_csv, write_json, write_trajectory_csv, atomic_write,
};
use super::CliError;

/// Projection of the retreat-regime sink onto the switching plane; the
/// canonical seed for section-map constructions.
pub fn retreat_sink_projection(p: &ModelParameters) -> Result<SectionPoint, CliError> {
    let planar = find_planar_equilibria(Regime::Retreat, p);
    planar
        .iter()
        .find(|e| e.stability == Stability::Sink)
        .map(|e| SectionPoint::new(e.w, e.eta))
        .ok_or_else(|| {
            CliError::Numerical("the retreat subsystem has no sink for these parameters".into())
        })
}

fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

// ---------------------------------------------------------------------------
// equilibria

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquilibriaReport {
    pub params: ModelParameters,
    pub equilibria: Vec<EquilibriumReport>,
}

pub fn cmd_equilibria(config: &RunConfig) -> Result<EquilibriaReport, CliError> {
    let p = &config.params;
    let mut equilibria = Vec::new();
    for regime in [Regime::Retreat, Regime::Advance] {
        equilibria.extend(find_equilibria(regime, p).map_err(numerical)?);
    }
    let report = EquilibriaReport {
        params: *p,
        equilibria,
    };
    write_json(&config.out_dir.join("equilibria.json"), &report)?;
    for e in &report.equilibria {
        println!(
            "{:7} ({:9.4}, {:6.4}, {:6.4})  {:?} {:?}",
            e.regime.label(),
            e.state.w,
            e.state.eta,
            e.state.xi,
            e.stability,
            e.classification
        );
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateSummary {
    pub start: State,
    pub start_regime: Regime,
    pub termination: Termination,
    pub events: usize,
    pub samples: usize,
    pub t_final: f64,
    pub final_state: State,
}

fn resolve_start(config: &RunConfig) -> Result<(State, Regime), CliError> {
    let p = &config.params;
    let state = match config.simulate.start {
        Some((w, eta, xi)) => State::new(w, eta, xi),
        None => {
            let z = retreat_sink_projection(p)?;
            z.state(p)
        }
    };
    let regime = match config.simulate.regime {
        Some(r) => r,
        None => {
            let h = switching_function(&state, p);
            if h.abs() <= config.integrator.event_tol {
                match classify_boundary_point(&state, p, config.integrator.event_tol)
                    .map_err(numerical)?
                {
                    BoundaryClass::SigmaPlus => Regime::Advance,
                    BoundaryClass::SigmaMinus => Regime::Retreat,
                    other => {
                        return Err(CliError::Config(format!(
                            "start lies on the plane at a {other:?} point; set simulate.regime explicitly"
                        )))
                    }
                }
            } else if h < 0.0 {
                Regime::Advance
            } else {
                Regime::Retreat
            }
        }
    };
    Ok((state, regime))
}

pub fn cmd_simulate(config: &RunConfig) -> Result<SimulateSummary, CliError> {
    let (start, regime) = resolve_start(config)?;
    let traj = evolve_hybrid(&start, regime, &config.params, &config.integrator)
        .map_err(numerical)?;
    let summary = SimulateSummary {
        start,
        start_regime: regime,
        termination: traj.termination,
        events: traj.events.len(),
        samples: traj.sample_count(),
        t_final: traj.final_time(),
        final_state: traj.final_state().unwrap_or(start),
    };
    write_trajectory_csv(&config.out_dir.join("trajectory.csv"), &traj)?;
    write_events_csv(&config.out_dir.join("events.csv"), &traj.events)?;
    write_json(&config.out_dir.join("simulate_summary.json"), &summary)?;
    println!(
        "simulate: {} events, {} samples, t_final = {:.6}, termination = {}",
        summary.events,
        summary.samples,
        summary.t_final,
        summary.termination.label()
    );
    Ok(summary)
}

// ---------------------------------------------------------------------------
// orbit

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub epsilon: f64,
    pub epsilon_bound: f64,
    pub seed: SectionPoint,
    pub orbit: OrbitResult,
    /// Transversal crossings along one closed period.
    pub crossings_per_period: usize,
    pub eta_range: (f64, f64),
    pub xi_range: (f64, f64),
}

pub fn cmd_orbit(config: &RunConfig) -> Result<OrbitSummary, CliError> {
    let p = &config.params;
    let bound = epsilon_bound(p);
    if p.epsilon >= bound && !config.orbit.allow_inadmissible_epsilon {
        return Err(CliError::Config(format!(
            "epsilon = {} is not admissible: the tangency curves intersect at eta = {:.6} unless epsilon < {:.12} \
             (set orbit.allow_inadmissible_epsilon = true to override)",
            p.epsilon,
            tangency_intersection_eta(p),
            bound
        )));
    }
    let ctx = SectionContext::new(*p, config.integrator).map_err(numerical)?;
    let seed = match config.orbit.seed {
        Some((w, eta)) => SectionPoint::new(w, eta),
        None => retreat_sink_projection(p)?,
    };
    let orbit = ctx.find_orbit(&seed, config.orbit.options).map_err(numerical)?;

    // One closed period from the fixed point; the tiny horizon margin keeps
    // the closing crossing inside the window without starting a third pass.
    let period_cfg = IntegratorConfig {
        max_time: orbit.period * (1.0 + 1e-9),
        sample_interval: orbit.period / config.orbit.trajectory_samples.max(2) as f64,
        ..config.integrator
    };
    let traj = evolve_hybrid(&orbit.fixed_point.state(p), Regime::Advance, p, &period_cfg)
        .map_err(numerical)?;
    let crossings = traj
        .events
        .iter()
        .filter(|e| {
            matches!(
                e.kind,
                BoundaryClass::SigmaPlus | BoundaryClass::SigmaMinus
            )
        })
        .count();
    let mut eta_range = (f64::INFINITY, f64::NEG_INFINITY);
    let mut xi_range = (f64::INFINITY, f64::NEG_INFINITY);
    for seg in &traj.segments {
        for s in &seg.samples {
            eta_range = (eta_range.0.min(s.state.eta), eta_range.1.max(s.state.eta));
            xi_range = (xi_range.0.min(s.state.xi), xi_range.1.max(s.state.xi));
        }
    }

    let summary = OrbitSummary {
        epsilon: p.epsilon,
        epsilon_bound: bound,
        seed,
        orbit,
        crossings_per_period: crossings,
        eta_range,
        xi_range,
    };
    write_json(&config.out_dir.join("orbit_summary.json"), &summary)?;
    write_trajectory_csv(&config.out_dir.join("orbit_period.csv"), &traj)?;
    write_events_csv(&config.out_dir.join("orbit_events.csv"), &traj.events)?;
    println!(
        "orbit: fixed point (w, eta) = ({:.8}, {:.8}), period = {:.6}, closure = {:.3e}, \
         contraction ~ {:.3e}, {} iterations, {} crossings/period",
        orbit.fixed_point.w,
        orbit.fixed_point.eta,
        orbit.period,
        orbit.closure_error,
        orbit.contraction_estimate,
        orbit.iterations,
        crossings
    );
    Ok(summary)
}

// ---------------------------------------------------------------------------
// nullclines

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NullclineReport {
    /// Roots of F − G+ in [0,1] (η-coordinates of the retreat equilibria).
    pub retreat_roots: Vec<f64>,
    /// Roots of F − G− in [0,1].
    pub advance_roots: Vec<f64>,
    /// g±(1) − G±(1); both vanish since the tangency offset carries (1−η).
    pub pole_gap_retreat: f64,
    pub pole_gap_advance: f64,
    pub samples: usize,
}

pub const NULLCLINE_HEADER: &str = "eta,F,G_plus,G_minus,g_plus,g_minus,gamma,h_plus,h_minus";

pub fn cmd_nullclines(config: &RunConfig) -> Result<NullclineReport, CliError> {
    let p = &config.params;
    let n = config.nullclines.samples;
    let mut csv = String::from(NULLCLINE_HEADER);
    csv.push('\n');
    for i in 0..n {
        let eta = i as f64 / (n - 1) as f64;
        let f = w_nullcline(eta, p);
        let g_plus = eta_nullcline(eta, Regime::Retreat, p);
        let g_minus = eta_nullcline(eta, Regime::Advance, p);
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            format_float(eta),
            format_float(f),
            format_float(g_plus),
            format_float(g_minus),
            format_float(tangency_curve(eta, Regime::Retreat, p)),
            format_float(tangency_curve(eta, Regime::Advance, p)),
            format_float(switching_ice_line(eta, p)),
            format_float(f - g_plus),
            format_float(f - g_minus),
        ));
    }
    atomic_write(&config.out_dir.join("nullclines.csv"), csv.as_bytes())?;

    let roots = |regime: Regime| -> Vec<f64> {
        find_planar_equilibria(regime, p)
            .iter()
            .map(|e| e.eta)
            .collect()
    };
    let report = NullclineReport {
        retreat_roots: roots(Regime::Retreat),
        advance_roots: roots(Regime::Advance),
        pole_gap_retreat: tangency_curve(1.0, Regime::Retreat, p)
            - eta_nullcline(1.0, Regime::Retreat, p),
        pole_gap_advance: tangency_curve(1.0, Regime::Advance, p)
            - eta_nullcline(1.0, Regime::Advance, p),
        samples: n,
    };
    write_json(&config.out_dir.join("nullclines.json"), &report)?;
    println!(
        "nullclines: {} samples; retreat roots {:?}, advance roots {:?}",
        n, report.retreat_roots, report.advance_roots
    );
    Ok(report)
}

// ---------------------------------------------------------------------------
// check-epsilon

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpsilonReport {
    pub epsilon: f64,
    pub bound: f64,
    /// Strict inequality; ε equal to the bound is inadmissible.
    pub admissible: bool,
    /// η(ε), the snow line at which the tangency curves would intersect.
    pub eta_intersection: f64,
}

pub fn cmd_check_epsilon(config: &RunConfig) -> Result<EpsilonReport, CliError> {
    let p = &config.params;
    let bound = epsilon_bound(p);
    let report = EpsilonReport {
        epsilon: p.epsilon,
        bound,
        admissible: p.epsilon < bound,
        eta_intersection: tangency_intersection_eta(p),
    };
    write_json(&config.out_dir.join("check_epsilon.json"), &report)?;
    println!(
        "epsilon = {} | bound = {} | admissible = {} | eta(epsilon) = {}",
        format_float(report.epsilon),
        format_float(report.bound),
        report.admissible,
        format_float(report.eta_intersection)
    );
    Ok(report)
}

