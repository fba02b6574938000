//! Event-accurate integration of the piecewise-smooth system: smooth
//! stepping inside each half-space, boundary detection with bisection
//! refinement, crossing classification, and regime switching.

mod events;
mod hybrid;
mod step;

pub use events::{filippov_sliding_field, locate_crossing};
pub use hybrid::{evolve_hybrid, flow_to_boundary, SegmentOutcome};
pub use step::smooth_step;

use serde::{Deserialize, Serialize};

use crate::model::{BoundaryClass, Regime, State};

/// Largest step the adaptive controller is allowed to take. Keeps boundary
/// detection dense relative to the switching dynamics.
pub(crate) const MAX_ADAPTIVE_STEP: f64 = 1.0;
/// Bisection budget for crossing refinement.
pub(crate) const MAX_BISECTIONS: usize = 100;

/// Time-stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMode {
    /// Classical 4-stage Runge-Kutta with a fixed step.
    FixedClassicalRk4,
    /// Dormand-Prince 5(4) embedded pair with error-controlled steps.
    EmbeddedAdaptive,
}

/// Integration settings shared by every trajectory computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub step_mode: StepMode,
    /// Fixed step size, or the initial step in adaptive mode.
    pub base_step: f64,
    /// Relative local-error tolerance (adaptive mode).
    pub rel_tol: f64,
    /// Absolute local-error tolerance (adaptive mode).
    pub abs_tol: f64,
    /// A point counts as on the switching plane when |h| is below this.
    pub event_tol: f64,
    /// Integration horizon.
    pub max_time: f64,
    /// Budget of recorded boundary crossings.
    pub max_events: usize,
    /// Minimum time between stored trajectory samples (0 stores every
    /// accepted step). Segment endpoints are always stored.
    pub sample_interval: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step_mode: StepMode::EmbeddedAdaptive,
            base_step: 1e-3,
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            event_tol: 1e-10,
            max_time: 1e4,
            max_events: 10_000,
            sample_interval: 0.0,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), IntegratorError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.base_step) || !positive(self.event_tol) || !positive(self.max_time) {
            return Err(IntegratorError::InvalidConfig(
                "base_step, event_tol and max_time must be positive".into(),
            ));
        }
        if self.step_mode == StepMode::EmbeddedAdaptive
            && (!positive(self.rel_tol) || !positive(self.abs_tol))
        {
            return Err(IntegratorError::InvalidConfig(
                "adaptive mode requires positive rel_tol and abs_tol".into(),
            ));
        }
        if self.sample_interval < 0.0 || self.sample_interval.is_nan() {
            return Err(IntegratorError::InvalidConfig(
                "sample_interval must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Why a hybrid trajectory stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Reached the configured horizon.
    MaxTime,
    /// Hit the repelling sliding strip, where forward solutions are
    /// nonunique; never integrated further.
    SlidingEntry,
    /// The snow or ice line left [0,1].
    LeftStateSpace,
    /// The crossing budget was exhausted.
    EventBudget,
    /// Reached the plane within tolerance of a tangency parabola; grazing
    /// continuation is out of scope and reported instead.
    Tangency,
}

impl Termination {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::MaxTime => "max_time",
            Termination::SlidingEntry => "sliding_entry",
            Termination::LeftStateSpace => "left_state_space",
            Termination::EventBudget => "event_budget",
            Termination::Tangency => "tangency",
        }
    }
}

/// A located intersection of the trajectory with the switching plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingEvent {
    pub time: f64,
    pub state: State,
    pub kind: BoundaryClass,
    pub regime_before: Regime,
    pub regime_after: Regime,
}

/// One stored trajectory point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: State,
}

/// A maximal smooth piece of the trajectory, integrated under one regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub regime: Regime,
    pub samples: Vec<Sample>,
}

/// A trajectory of the discontinuous system: regime-labeled smooth segments
/// joined at boundary crossings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridTrajectory {
    pub segments: Vec<Segment>,
    pub events: Vec<CrossingEvent>,
    pub termination: Termination,
}

impl HybridTrajectory {
    /// Final recorded time.
    pub fn final_time(&self) -> f64 {
        self.segments
            .last()
            .and_then(|s| s.samples.last())
            .map(|s| s.t)
            .unwrap_or(0.0)
    }

    /// Final recorded state.
    pub fn final_state(&self) -> Option<State> {
        self.segments
            .last()
            .and_then(|s| s.samples.last())
            .map(|s| s.state)
    }

    /// Total number of stored samples across all segments.
    pub fn sample_count(&self) -> usize {
        self.segments.iter().map(|s| s.samples.len()).sum()
    }
}

/// Errors from the integration layer.
#[derive(Debug, thiserror::Error)]
pub enum IntegratorError {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error("start state lies outside the model domain")]
    StartOutsideDomain,
    #[error("adaptive step size underflow at t = {t}: dt = {dt:e}")]
    StepSizeUnderflow { t: f64, dt: f64 },
    #[error("switching function does not change sign across the step")]
    NoSignChange,
    #[error("crossing bisection did not converge within {0} iterations")]
    BisectionStalled(usize),
    #[error("point is not in the sliding set: both fields cross the plane in the same direction")]
    NotSliding,
}
