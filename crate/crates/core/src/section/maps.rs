//! The two boundary-to-boundary section maps and their composition.
//!
//! r− flows the advance field from the transversal-entry part of the plane
//! back to its transversal-exit part; r+ is the mirror map. Their
//! composition is the return map whose fixed point is the periodic orbit.

use serde::{Deserialize, Serialize};

use crate::integrator::{flow_to_boundary, IntegratorConfig, SegmentOutcome};
use crate::model::{
    classify_boundary_point, switching_ice_line, BoundaryClass, ModelParameters, Regime, State,
};

use super::{GuardSet, SectionError};

/// A point of the switching plane, coordinatized by (w, η); the ice line is
/// implied by the plane equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub w: f64,
    pub eta: f64,
}

impl SectionPoint {
    pub fn new(w: f64, eta: f64) -> Self {
        Self { w, eta }
    }

    /// The full state on the plane.
    pub fn state(&self, p: &ModelParameters) -> State {
        State::new(self.w, self.eta, switching_ice_line(self.eta, p))
    }

    /// Distance in the plane-embedded norm, which includes the induced
    /// ice-line difference (1 + a/b)·Δη as a third component.
    pub fn distance(&self, other: &SectionPoint, p: &ModelParameters) -> f64 {
        let dw = self.w - other.w;
        let de = self.eta - other.eta;
        let dxi = (1.0 + p.accum / p.b) * de;
        (dw * dw + de * de + dxi * dxi).sqrt()
    }

    /// Planar Euclidean distance in (w, η) only.
    pub fn planar_distance(&self, other: &SectionPoint) -> f64 {
        let dw = self.w - other.w;
        let de = self.eta - other.eta;
        (dw * dw + de * de).sqrt()
    }
}

/// Which section map to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionMapChoice {
    /// r−: transversal-entry set Σ+ to Σ−, flowing the advance field.
    Minus,
    /// r+: Σ− back to Σ+, flowing the retreat field.
    Plus,
}

/// Shared machinery for repeated section-map evaluations: parameters,
/// integrator settings, and the tabulated guard set.
pub struct SectionContext {
    params: ModelParameters,
    config: IntegratorConfig,
    guard: GuardSet,
}

impl SectionContext {
    pub fn new(params: ModelParameters, config: IntegratorConfig) -> Result<Self, SectionError> {
        params.validate().map_err(SectionError::Model)?;
        config.validate().map_err(SectionError::Integrator)?;
        let guard = GuardSet::compute(&params, &config)?;
        Ok(Self {
            params,
            config,
            guard,
        })
    }

    /// Reuse an already-tabulated guard set (it depends only on the planar
    /// advance subsystem, not on the ablation rates or ε).
    pub fn with_guard(
        params: ModelParameters,
        config: IntegratorConfig,
        guard: GuardSet,
    ) -> Result<Self, SectionError> {
        params.validate().map_err(SectionError::Model)?;
        config.validate().map_err(SectionError::Integrator)?;
        Ok(Self {
            params,
            config,
            guard,
        })
    }

    pub fn params(&self) -> &ModelParameters {
        &self.params
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.config
    }

    pub fn guard(&self) -> &GuardSet {
        &self.guard
    }

    /// Check the preconditions of the chosen map at `x`: the point must lie
    /// in the map's transversal entry set and in the guard set.
    pub fn check_admissible(
        &self,
        x: &SectionPoint,
        map: SectionMapChoice,
    ) -> Result<(), SectionError> {
        let state = x.state(&self.params);
        let kind = classify_boundary_point(&state, &self.params, self.config.event_tol)
            .map_err(SectionError::Model)?;
        let required = match map {
            SectionMapChoice::Minus => BoundaryClass::SigmaPlus,
            SectionMapChoice::Plus => BoundaryClass::SigmaMinus,
        };
        if kind != required {
            return Err(SectionError::NotAdmissible(format!(
                "point (w = {}, eta = {}) classifies as {kind:?}, need {required:?}",
                x.w, x.eta
            )));
        }
        if !self.guard.contains(x) {
            return Err(SectionError::NotAdmissible(format!(
                "point (w = {}, eta = {}) lies below the saddle separatrix (m = {})",
                x.w,
                x.eta,
                self.guard.separatrix_w(x.eta)
            )));
        }
        Ok(())
    }

    /// Whether `x` satisfies the chosen map's preconditions.
    pub fn is_admissible(&self, x: &SectionPoint, map: SectionMapChoice) -> bool {
        self.check_admissible(x, map).is_ok()
    }

    fn apply(
        &self,
        x: &SectionPoint,
        map: SectionMapChoice,
    ) -> Result<(SectionPoint, f64), SectionError> {
        self.check_admissible(x, map)?;
        let (regime, target) = match map {
            SectionMapChoice::Minus => (Regime::Advance, BoundaryClass::SigmaMinus),
            SectionMapChoice::Plus => (Regime::Retreat, BoundaryClass::SigmaPlus),
        };
        let start = x.state(&self.params);
        let outcome = flow_to_boundary(
            &start,
            regime,
            0.0,
            &self.params,
            &self.config,
            None,
            false,
        )
        .map_err(SectionError::Integrator)?;
        match outcome {
            SegmentOutcome::Crossed { time, state, kind } if kind == target => {
                Ok((SectionPoint::new(state.w, state.eta), time))
            }
            SegmentOutcome::Crossed { kind, .. } => Err(SectionError::WrongBoundarySet { kind }),
            SegmentOutcome::Terminated { reason, .. } => {
                Err(SectionError::MapUndefined { reason })
            }
        }
    }

    /// r−: flow the advance field from Σ+ ∩ T to its first transversal
    /// return at Σ−. Returns the landing point and the transit time.
    pub fn map_minus(&self, x: &SectionPoint) -> Result<(SectionPoint, f64), SectionError> {
        self.apply(x, SectionMapChoice::Minus)
    }

    /// r+: flow the retreat field from Σ− ∩ T back to Σ+.
    pub fn map_plus(&self, y: &SectionPoint) -> Result<(SectionPoint, f64), SectionError> {
        self.apply(y, SectionMapChoice::Plus)
    }

    /// The return map r+ ∘ r−, with the summed transit time (the period of
    /// the orbit through `x` when `x` is the fixed point).
    pub fn composite(&self, x: &SectionPoint) -> Result<(SectionPoint, f64), SectionError> {
        let (mid, t_minus) = self.map_minus(x)?;
        let (back, t_plus) = self.map_plus(&mid)?;
        Ok((back, t_minus + t_plus))
    }
}

/// One application of r−. Convenience wrapper that builds a
/// [`SectionContext`] per call; reuse the context in loops.
pub fn section_map_minus(
    x: &SectionPoint,
    p: &ModelParameters,
    cfg: &IntegratorConfig,
) -> Result<(SectionPoint, f64), SectionError> {
    SectionContext::new(*p, *cfg)?.map_minus(x)
}

/// One application of r+.
pub fn section_map_plus(
    y: &SectionPoint,
    p: &ModelParameters,
    cfg: &IntegratorConfig,
) -> Result<(SectionPoint, f64), SectionError> {
    SectionContext::new(*p, *cfg)?.map_plus(y)
}

/// One application of the return map r+ ∘ r−.
pub fn composite_map(
    x: &SectionPoint,
    p: &ModelParameters,
    cfg: &IntegratorConfig,
) -> Result<(SectionPoint, f64), SectionError> {
    SectionContext::new(*p, *cfg)?.composite(x)
}
