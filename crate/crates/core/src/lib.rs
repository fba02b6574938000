//! A three-variable conceptual model of glacial cycles — global temperature,
//! snow line, and ice line — formulated as a discontinuous (Filippov) vector
//! field with two climate regimes separated by a switching plane.
//!
//! The crate provides:
//!
//! * [`model`] — the closed-form layer: parameters, nullclines, regime
//!   fields, Jacobians, switching-plane geometry, equilibria with
//!   regular/virtual/boundary classification, and the quadratic-profile
//!   reduction used as a cross-check.
//! * [`integrator`] — event-accurate hybrid integration: smooth stepping,
//!   boundary-crossing refinement, transversality classification, and
//!   regime switching in the Filippov sense.
//! * [`section`] — the boundary-to-boundary section maps, fixed-point
//!   iteration to the attracting periodic orbit, and contraction estimates.
//! * [`experiments`] — configuration, serialized outputs, and the
//!   experiment commands behind the `glacial-cycles` CLI.

pub mod experiments;
pub mod integrator;
pub mod model;
pub mod section;

pub use integrator::{
    evolve_hybrid, CrossingEvent, HybridTrajectory, IntegratorConfig, Sample, Segment, StepMode,
    Termination,
};
pub use model::{ModelParameters, Regime, State};
pub use section::{OrbitResult, SectionContext, SectionPoint};
