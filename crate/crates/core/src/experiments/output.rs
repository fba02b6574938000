//! Serialized experiment outputs: trajectory and event-log CSV files and
//! JSON reports, plus the readers used to round-trip them.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::integrator::{CrossingEvent, HybridTrajectory, Sample, Segment, Termination};
use crate::model::{BoundaryClass, Regime, State};

use super::CliError;

/// Floating-point values are printed with 17 significant digits, enough to
/// reproduce the f64 bit pattern on parse.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Write a file atomically: stage into a sibling temp file, then rename.
pub fn atomic_write(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
        f.write_all(contents).map_err(|e| io_err(&tmp, e))?;
        f.sync_all().map_err(|e| io_err(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

pub const TRAJECTORY_HEADER: &str = "t,w,eta,xi,regime";
pub const EVENT_HEADER: &str = "t,w,eta,xi,kind,regime_before,regime_after";

/// Render a hybrid trajectory as CSV with one row per stored sample.
pub fn trajectory_csv(traj: &HybridTrajectory) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for seg in &traj.segments {
        for s in &seg.samples {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                format_float(s.t),
                format_float(s.state.w),
                format_float(s.state.eta),
                format_float(s.state.xi),
                seg.regime.label()
            ));
        }
    }
    out
}

pub fn write_trajectory_csv(path: &Path, traj: &HybridTrajectory) -> Result<(), CliError> {
    atomic_write(path, trajectory_csv(traj).as_bytes())
}

fn parse_float(field: &str, line_no: usize) -> Result<f64, CliError> {
    field
        .parse::<f64>()
        .map_err(|_| CliError::Io(format!("line {line_no}: bad float '{field}'")))
}

/// Parse a trajectory CSV back into regime-labeled segments. Termination is
/// not stored in the CSV; the returned trajectory carries `MaxTime`.
pub fn read_trajectory_csv(text: &str) -> Result<HybridTrajectory, CliError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == TRAJECTORY_HEADER => {}
        other => {
            return Err(CliError::Io(format!(
                "bad trajectory header: {:?}",
                other.map(|(_, h)| h)
            )))
        }
    }
    let mut segments: Vec<Segment> = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 5 {
            return Err(CliError::Io(format!(
                "line {}: expected 5 fields, got {}",
                idx + 1,
                parts.len()
            )));
        }
        let t = parse_float(parts[0], idx + 1)?;
        let state = State::new(
            parse_float(parts[1], idx + 1)?,
            parse_float(parts[2], idx + 1)?,
            parse_float(parts[3], idx + 1)?,
        );
        let regime: Regime = parts[4]
            .parse()
            .map_err(|e| CliError::Io(format!("line {}: {e}", idx + 1)))?;
        match segments.last_mut() {
            Some(seg) if seg.regime == regime => seg.samples.push(Sample { t, state }),
            _ => segments.push(Segment {
                regime,
                samples: vec![Sample { t, state }],
            }),
        }
    }
    Ok(HybridTrajectory {
        segments,
        events: Vec::new(),
        termination: Termination::MaxTime,
    })
}

/// Render the crossing-event log as CSV.
pub fn events_csv(events: &[CrossingEvent]) -> String {
    let mut out = String::from(EVENT_HEADER);
    out.push('\n');
    for ev in events {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            format_float(ev.time),
            format_float(ev.state.w),
            format_float(ev.state.eta),
            format_float(ev.state.xi),
            ev.kind.label(),
            ev.regime_before.label(),
            ev.regime_after.label()
        ));
    }
    out
}

pub fn write_events_csv(path: &Path, events: &[CrossingEvent]) -> Result<(), CliError> {
    atomic_write(path, events_csv(events).as_bytes())
}

pub fn read_events_csv(text: &str) -> Result<Vec<CrossingEvent>, CliError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == EVENT_HEADER => {}
        other => {
            return Err(CliError::Io(format!(
                "bad event header: {:?}",
                other.map(|(_, h)| h)
            )))
        }
    }
    let mut events = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 7 {
            return Err(CliError::Io(format!(
                "line {}: expected 7 fields, got {}",
                idx + 1,
                parts.len()
            )));
        }
        let kind: BoundaryClass = parts[4]
            .parse()
            .map_err(|e| CliError::Io(format!("line {}: {e}", idx + 1)))?;
        let parse_regime = |s: &str| -> Result<Regime, CliError> {
            s.parse()
                .map_err(|e| CliError::Io(format!("line {}: {e}", idx + 1)))
        };
        events.push(CrossingEvent {
            time: parse_float(parts[0], idx + 1)?,
            state: State::new(
                parse_float(parts[1], idx + 1)?,
                parse_float(parts[2], idx + 1)?,
                parse_float(parts[3], idx + 1)?,
            ),
            kind,
            regime_before: parse_regime(parts[5])?,
            regime_after: parse_regime(parts[6])?,
        });
    }
    Ok(events)
}

/// Serialize a report as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut body = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::Io(format!("serializing {}: {e}", path.display())))?;
    body.push(b'\n');
    atomic_write(path, &body)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
