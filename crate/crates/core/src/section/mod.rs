//! Boundary-to-boundary section maps of the Filippov flow, fixed-point
//! iteration to the attracting periodic orbit, and empirical contraction
//! estimates.

mod guard;
mod maps;
mod orbit;

pub use guard::{guard_set_membership, GuardSet};
pub use maps::{
    composite_map, section_map_minus, section_map_plus, SectionContext, SectionMapChoice,
    SectionPoint,
};
pub use orbit::{
    estimate_contraction, find_periodic_orbit, ContractionEstimate, OrbitOptions, OrbitResult,
    SectionNorm, SectionRegion,
};

use crate::integrator::Termination;
use crate::model::BoundaryClass;

/// Errors from the section-map layer.
#[derive(Debug, thiserror::Error)]
pub enum SectionError {
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Integrator(#[from] crate::integrator::IntegratorError),
    #[error("point is not in the map's domain: {0}")]
    NotAdmissible(String),
    #[error("the planar advance subsystem has no saddle; guard set undefined")]
    GuardUnavailable,
    #[error("section map undefined: trajectory terminated with {reason:?} before the target boundary set")]
    MapUndefined { reason: Termination },
    #[error("section map undefined: trajectory reached the plane at a {kind:?} point")]
    WrongBoundarySet { kind: BoundaryClass },
    #[error("no periodic orbit found within {iterations} iterations (last step {last_delta:e})")]
    NoOrbitFound { iterations: usize, last_delta: f64 },
    #[error("invalid region: {0}")]
    InvalidRegion(String),
}
