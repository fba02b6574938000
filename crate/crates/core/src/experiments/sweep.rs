//! Boundary-equilibrium bifurcation sweep: step the advance ablation rate
//! through the switching value, classifying each point as a limit cycle, a
//! regular rest point, or a boundary equilibrium.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{
    find_equilibria, switching_function, Classification, EquilibriumReport, ModelParameters,
    Regime, Stability, State,
};
use crate::section::{GuardSet, OrbitResult, SectionContext, SectionError};

use super::commands::retreat_sink_projection;
use super::config::RunConfig;
use super::output::{atomic_write, format_float, write_json};
use super::CliError;

/// Classification of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOutcome {
    LimitCycle,
    RegularSinkAdvance,
    RegularSinkRetreat,
    BoundaryEquilibrium,
    Undetermined,
}

impl SweepOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            SweepOutcome::LimitCycle => "limit_cycle",
            SweepOutcome::RegularSinkAdvance => "regular_sink_advance",
            SweepOutcome::RegularSinkRetreat => "regular_sink_retreat",
            SweepOutcome::BoundaryEquilibrium => "boundary_equilibrium",
            SweepOutcome::Undetermined => "undetermined",
        }
    }
}

/// One sweep point: the swept value, its outcome, supporting equilibria, and
/// the orbit when one was found.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRecord {
    pub b0: f64,
    pub outcome: SweepOutcome,
    pub equilibria: Vec<EquilibriumReport>,
    pub orbit: Option<OrbitResult>,
    /// Switching offset at the advance-sink lift; crosses zero at the
    /// bifurcation.
    pub advance_sink_offset: Option<f64>,
    pub note: Option<String>,
}

/// A maximal run of equal outcomes along the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepBlock {
    pub outcome: SweepOutcome,
    pub b0_from: f64,
    pub b0_to: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
    pub blocks: Vec<SweepBlock>,
    /// Whether the outcomes partition into contiguous blocks (no outcome
    /// recurs in separated runs). Violations are left in the data for
    /// review, never suppressed.
    pub contiguous: bool,
}

/// Switching offset at the advance-sink lift for ablation rate `b0`, given
/// the planar sink position (which does not depend on `b0`).
fn advance_sink_offset(eta_star: f64, b0: f64, p: &ModelParameters) -> f64 {
    let xi = eta_star + (p.accum / b0) * (eta_star - 1.0);
    let state = State::new(0.0, eta_star, xi);
    switching_function(&state, p)
}

fn attempt_orbit(
    p: &ModelParameters,
    config: &RunConfig,
    guard: &GuardSet,
) -> Result<OrbitResult, String> {
    let ctx = SectionContext::with_guard(*p, config.integrator, guard.clone())
        .map_err(|e| e.to_string())?;
    let seed = match config.orbit.seed {
        Some((w, eta)) => crate::section::SectionPoint::new(w, eta),
        None => retreat_sink_projection(p).map_err(|e| e.to_string())?,
    };
    ctx.find_orbit(&seed, config.orbit.options)
        .map_err(|e: SectionError| e.to_string())
}

fn sweep_point(b0: f64, config: &RunConfig, guard: &GuardSet) -> SweepRecord {
    let step = config.sweep.b0_step;
    let p = ModelParameters {
        b0,
        ..config.params
    };
    if let Err(e) = p.validate() {
        return SweepRecord {
            b0,
            outcome: SweepOutcome::Undetermined,
            equilibria: Vec::new(),
            orbit: None,
            advance_sink_offset: None,
            note: Some(e.to_string()),
        };
    }

    let mut equilibria = Vec::new();
    for regime in [Regime::Retreat, Regime::Advance] {
        match find_equilibria(regime, &p) {
            Ok(list) => equilibria.extend(list),
            Err(e) => {
                return SweepRecord {
                    b0,
                    outcome: SweepOutcome::Undetermined,
                    equilibria,
                    orbit: None,
                    advance_sink_offset: None,
                    note: Some(e.to_string()),
                }
            }
        }
    }
    let sink_of = |regime: Regime| {
        equilibria
            .iter()
            .find(|e| e.regime == regime && e.stability == Stability::Sink)
            .copied()
    };
    let advance_sink = sink_of(Regime::Advance);
    let retreat_sink = sink_of(Regime::Retreat);
    let offset = advance_sink.map(|s| switching_function(&s.state, &p));

    let record = |outcome, orbit, note: Option<String>| SweepRecord {
        b0,
        outcome,
        equilibria: equilibria.clone(),
        orbit,
        advance_sink_offset: offset,
        note,
    };

    let (advance_sink, retreat_sink) = match (advance_sink, retreat_sink) {
        (Some(a), Some(r)) => (a, r),
        _ => {
            return record(
                SweepOutcome::Undetermined,
                None,
                Some("a regime is missing its sink".into()),
            )
        }
    };

    // Exact boundary classification, or within one sweep step of the
    // crossing: the offset band is the half-difference of the lifted
    // offsets one step to either side.
    let on_boundary = advance_sink.classification == Classification::Boundary
        || retreat_sink.classification == Classification::Boundary
        || {
            let lo = (b0 - step).max(0.5 * b0);
            let hi = b0 + step;
            let band = 0.5
                * (advance_sink_offset(advance_sink.state.eta, lo, &p)
                    - advance_sink_offset(advance_sink.state.eta, hi, &p))
                .abs();
            offset.map(|h| h.abs() <= band).unwrap_or(false)
        };
    if on_boundary {
        return record(SweepOutcome::BoundaryEquilibrium, None, None);
    }

    if advance_sink.classification == Classification::Regular {
        let (orbit, note) = match attempt_orbit(&p, config, guard) {
            Ok(orbit) => (
                Some(orbit),
                Some("orbit search converged despite a regular advance sink".into()),
            ),
            Err(_) => (None, None),
        };
        return record(SweepOutcome::RegularSinkAdvance, orbit, note);
    }
    if retreat_sink.classification == Classification::Regular {
        let (orbit, note) = match attempt_orbit(&p, config, guard) {
            Ok(orbit) => (
                Some(orbit),
                Some("orbit search converged despite a regular retreat sink".into()),
            ),
            Err(_) => (None, None),
        };
        return record(SweepOutcome::RegularSinkRetreat, orbit, note);
    }

    match attempt_orbit(&p, config, guard) {
        Ok(orbit) => record(SweepOutcome::LimitCycle, Some(orbit), None),
        Err(e) => record(SweepOutcome::Undetermined, None, Some(e)),
    }
}

fn blocks_of(records: &[SweepRecord]) -> (Vec<SweepBlock>, bool) {
    let mut blocks: Vec<SweepBlock> = Vec::new();
    for r in records {
        match blocks.last_mut() {
            Some(b) if b.outcome == r.outcome => {
                b.b0_to = r.b0;
                b.points += 1;
            }
            _ => blocks.push(SweepBlock {
                outcome: r.outcome,
                b0_from: r.b0,
                b0_to: r.b0,
                points: 1,
            }),
        }
    }
    let mut seen = Vec::new();
    let mut contiguous = true;
    for b in &blocks {
        if seen.contains(&b.outcome) {
            contiguous = false;
        }
        seen.push(b.outcome);
    }
    (blocks, contiguous)
}

pub fn cmd_sweep_b0(config: &RunConfig) -> Result<SweepReport, CliError> {
    let s = &config.sweep;
    let n = ((s.b0_max - s.b0_min) / s.b0_step).round() as usize;
    let values: Vec<f64> = (0..=n).map(|k| s.b0_min + k as f64 * s.b0_step).collect();

    // The guard separatrix depends only on the planar advance subsystem,
    // which the sweep does not touch; tabulate it once.
    let guard = GuardSet::compute(&config.params, &config.integrator)
        .map_err(|e| CliError::Numerical(e.to_string()))?;

    let run = || -> Vec<SweepRecord> {
        values
            .par_iter()
            .map(|&b0| sweep_point(b0, config, &guard))
            .collect()
    };
    let records = if s.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(s.workers)
            .build()
            .map_err(|e| CliError::Numerical(format!("worker pool: {e}")))?;
        pool.install(run)
    } else {
        run()
    };

    let (blocks, contiguous) = blocks_of(&records);
    let report = SweepReport {
        records,
        blocks,
        contiguous,
    };
    write_json(&config.out_dir.join("sweep_b0.json"), &report)?;

    let mut csv = String::from("b0,outcome,period,closure_error,advance_sink_offset\n");
    for r in &report.records {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            format_float(r.b0),
            r.outcome.label(),
            r.orbit.map(|o| format_float(o.period)).unwrap_or_default(),
            r.orbit
                .map(|o| format_float(o.closure_error))
                .unwrap_or_default(),
            r.advance_sink_offset.map(format_float).unwrap_or_default(),
        ));
    }
    atomic_write(&config.out_dir.join("sweep_b0.csv"), csv.as_bytes())?;

    for b in &report.blocks {
        println!(
            "b0 in [{:.4}, {:.4}] ({} points): {}",
            b.b0_from,
            b.b0_to,
            b.points,
            b.outcome.label()
        );
    }
    if !report.contiguous {
        println!("warning: outcome blocks are not contiguous; inspect sweep_b0.json");
    }
    Ok(report)
}
