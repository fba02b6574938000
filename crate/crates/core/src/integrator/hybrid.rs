//! The hybrid trajectory loop: smooth segments, crossing refinement,
//! classification, and regime switching in the Filippov sense.

use crate::model::{
    classify_boundary_point, switching_function, switching_ice_line, BoundaryClass,
    ModelParameters, Regime, State,
};

use super::events::locate_crossing;
use super::step::Stepper;
use super::{
    CrossingEvent, HybridTrajectory, IntegratorConfig, IntegratorError, Sample, Segment,
    Termination,
};

/// How one smooth segment ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentOutcome {
    /// The trajectory reached the switching plane; `state` lies on it (the
    /// ice line is snapped onto the plane) and `kind` classifies the point.
    Crossed {
        time: f64,
        state: State,
        kind: BoundaryClass,
    },
    /// The segment ended without reaching the plane.
    Terminated {
        reason: Termination,
        time: f64,
        state: State,
    },
}

/// Integrate one smooth segment of the given regime from `(t_start, start)`
/// until the first arrival at the switching plane, the time horizon, or a
/// domain exit. Samples are appended to `samples` when provided; the segment
/// start is recorded only when `include_start` is set, so consecutive
/// segments share no duplicate times.
pub fn flow_to_boundary(
    start: &State,
    regime: Regime,
    t_start: f64,
    p: &ModelParameters,
    cfg: &IntegratorConfig,
    mut samples: Option<&mut Vec<Sample>>,
    include_start: bool,
) -> Result<SegmentOutcome, IntegratorError> {
    let mut t = t_start;
    let mut state = *start;
    let mut last_sample_t = f64::NEG_INFINITY;

    let push = |t: f64, s: State, last: &mut f64, sink: &mut Option<&mut Vec<Sample>>| {
        if let Some(v) = sink.as_deref_mut() {
            if t > *last {
                v.push(Sample { t, state: s });
                *last = t;
            }
        }
    };
    if include_start {
        push(t, state, &mut last_sample_t, &mut samples);
    } else {
        last_sample_t = t_start;
    }

    // Crossings are detected relative to the side the segment starts on:
    // the regime's own half-space, unless the caller explicitly starts the
    // flow on the far side of the plane.
    let h0 = switching_function(&state, p);
    let home = if h0.abs() > cfg.event_tol {
        h0.signum()
    } else {
        regime.home_sign()
    };
    let mut armed = home * h0 >= cfg.event_tol;

    let mut stepper = Stepper::new(cfg);
    let mut sample_due = t_start;

    loop {
        let dt_cap = cfg.max_time - t;
        if dt_cap <= 1e-14 * cfg.max_time.max(1.0) {
            push(t, state, &mut last_sample_t, &mut samples);
            return Ok(SegmentOutcome::Terminated {
                reason: Termination::MaxTime,
                time: t,
                state,
            });
        }
        let (next, taken) = stepper.step(&state, regime, t, dt_cap, p, cfg)?;
        let h_new = switching_function(&next, p);
        if !armed && home * h_new >= cfg.event_tol {
            armed = true;
        }
        if -home * h_new > cfg.event_tol {
            let (frac, located) = locate_crossing(&state, &next, taken, regime, p, cfg)?;
            let t_c = t + frac * taken;
            let on_plane = State::new(located.w, located.eta, switching_ice_line(located.eta, p));
            let kind = classify_boundary_point(&on_plane, p, cfg.event_tol)
                .map_err(IntegratorError::Model)?;
            push(t_c, on_plane, &mut last_sample_t, &mut samples);
            if !armed {
                // The trajectory never left the boundary layer before heading
                // back across: grazing, reported rather than continued.
                return Ok(SegmentOutcome::Terminated {
                    reason: Termination::Tangency,
                    time: t_c,
                    state: on_plane,
                });
            }
            return Ok(SegmentOutcome::Crossed {
                time: t_c,
                state: on_plane,
                kind,
            });
        }

        state = next;
        t += taken;
        if cfg.sample_interval <= 0.0 || t >= sample_due + cfg.sample_interval {
            push(t, state, &mut last_sample_t, &mut samples);
            sample_due = t;
        }
        if !state.in_domain() {
            push(t, state, &mut last_sample_t, &mut samples);
            return Ok(SegmentOutcome::Terminated {
                reason: Termination::LeftStateSpace,
                time: t,
                state,
            });
        }
    }
}

/// Integrate the discontinuous system from `start` under `start_regime`,
/// switching regimes at transversal crossings, until a terminal condition.
pub fn evolve_hybrid(
    start: &State,
    start_regime: Regime,
    p: &ModelParameters,
    cfg: &IntegratorConfig,
) -> Result<HybridTrajectory, IntegratorError> {
    p.validate()?;
    cfg.validate()?;
    if !start.in_domain() {
        return Err(IntegratorError::StartOutsideDomain);
    }

    let mut segments: Vec<Segment> = Vec::new();
    let mut events: Vec<CrossingEvent> = Vec::new();
    let mut regime = start_regime;
    let mut state = *start;
    let mut t = 0.0;

    loop {
        let mut samples = Vec::new();
        let outcome = flow_to_boundary(
            &state,
            regime,
            t,
            p,
            cfg,
            Some(&mut samples),
            segments.is_empty(),
        )?;
        segments.push(Segment { regime, samples });

        match outcome {
            SegmentOutcome::Terminated { reason, .. } => {
                return Ok(HybridTrajectory {
                    segments,
                    events,
                    termination: reason,
                });
            }
            SegmentOutcome::Crossed {
                time,
                state: crossing,
                kind,
            } => {
                let regime_after = match kind {
                    BoundaryClass::SigmaPlus => Regime::Advance,
                    BoundaryClass::SigmaMinus => Regime::Retreat,
                    _ => regime,
                };
                events.push(CrossingEvent {
                    time,
                    state: crossing,
                    kind,
                    regime_before: regime,
                    regime_after,
                });
                match kind {
                    BoundaryClass::SigmaPlus | BoundaryClass::SigmaMinus => {
                        if events.len() >= cfg.max_events {
                            return Ok(HybridTrajectory {
                                segments,
                                events,
                                termination: Termination::EventBudget,
                            });
                        }
                        regime = regime_after;
                        state = crossing;
                        t = time;
                    }
                    BoundaryClass::SlidingRepelling => {
                        return Ok(HybridTrajectory {
                            segments,
                            events,
                            termination: Termination::SlidingEntry,
                        });
                    }
                    BoundaryClass::TangencyPlus | BoundaryClass::TangencyMinus => {
                        return Ok(HybridTrajectory {
                            segments,
                            events,
                            termination: Termination::Tangency,
                        });
                    }
                }
            }
        }
    }
}
