//! Fixed-point iteration of the return map to the attracting periodic
//! orbit, and Monte Carlo contraction-factor estimation over compact
//! regions of the plane.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::integrator::IntegratorConfig;
use crate::model::ModelParameters;

use super::maps::{SectionContext, SectionMapChoice, SectionPoint};
use super::SectionError;

/// Iteration settings for the orbit search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitOptions {
    /// Convergence threshold on successive section returns, measured in the
    /// plane-embedded norm.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 500,
        }
    }
}

/// A located attracting periodic orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitResult {
    /// Fixed point of r+ ∘ r− on the transversal-entry set Σ+.
    pub fixed_point: SectionPoint,
    /// Its image under r−, on Σ−.
    pub partner_point: SectionPoint,
    /// Sum of the two transit times at the fixed point.
    pub period: f64,
    /// Distance between the fixed point and one further return.
    pub closure_error: f64,
    /// Observed per-iteration contraction ratio of the return map.
    pub contraction_estimate: f64,
    /// Return-map applications used by the iteration.
    pub iterations: usize,
}

impl SectionContext {
    /// Picard-iterate the return map from `seed` until successive section
    /// points agree to tolerance; the map is strongly contracting for
    /// admissible ε so no acceleration is needed.
    pub fn find_orbit(
        &self,
        seed: &SectionPoint,
        options: OrbitOptions,
    ) -> Result<OrbitResult, SectionError> {
        let p = self.params();
        let mut x = *seed;
        let mut prev_delta: Option<f64> = None;
        let mut contraction: Option<f64> = None;
        let mut iterations = 0;

        for _ in 0..options.max_iterations {
            let (next, _) = self.composite(&x)?;
            iterations += 1;
            let delta = next.distance(&x, p);
            if let Some(prev) = prev_delta {
                // Ratios are meaningful only above the event-location noise
                // floor; skip once the gaps are tiny.
                if prev > 1e-7 && delta > 0.0 {
                    let ratio = delta / prev;
                    contraction = Some(contraction.map_or(ratio, |c: f64| c.max(ratio)));
                }
            }
            x = next;
            if delta < options.tolerance {
                let (once_more, period) = self.composite(&x)?;
                let closure_error = once_more.distance(&x, p);
                let (partner_point, _) = self.map_minus(&x)?;
                let contraction_estimate = match contraction {
                    Some(c) => c,
                    None => self.probe_contraction(&x)?,
                };
                return Ok(OrbitResult {
                    fixed_point: x,
                    partner_point,
                    period,
                    closure_error,
                    contraction_estimate,
                    iterations,
                });
            }
            prev_delta = Some(delta);
        }
        Err(SectionError::NoOrbitFound {
            iterations,
            last_delta: prev_delta.unwrap_or(f64::NAN),
        })
    }

    /// Directional probe of the return map's contraction at a fixed point,
    /// used when the iteration converged too fast to measure a ratio.
    fn probe_contraction(&self, x: &SectionPoint) -> Result<f64, SectionError> {
        let p = *self.params();
        let delta = 1e-4;
        let mut worst: f64 = 0.0;
        let mut measured = false;
        for probe in [
            SectionPoint::new(x.w - delta, x.eta),
            SectionPoint::new(x.w, x.eta + delta),
            SectionPoint::new(x.w - delta, x.eta + delta),
        ] {
            if !self.is_admissible(&probe, SectionMapChoice::Minus) {
                continue;
            }
            let (image, _) = self.composite(&probe)?;
            worst = worst.max(image.distance(x, &p) / probe.distance(x, &p));
            measured = true;
        }
        if measured {
            Ok(worst)
        } else {
            Err(SectionError::NotAdmissible(
                "no admissible probe direction at the fixed point".into(),
            ))
        }
    }
}

/// Locate the attracting periodic orbit from a seed point of Σ+ ∩ T with
/// default iteration settings.
pub fn find_periodic_orbit(
    seed: &SectionPoint,
    p: &ModelParameters,
    cfg: &IntegratorConfig,
) -> Result<OrbitResult, SectionError> {
    SectionContext::new(*p, *cfg)?.find_orbit(seed, OrbitOptions::default())
}

/// An axis-aligned rectangle in (w, η) on the switching plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionRegion {
    pub w_min: f64,
    pub w_max: f64,
    pub eta_min: f64,
    pub eta_max: f64,
}

impl SectionRegion {
    pub fn centered(center: &SectionPoint, w_span: f64, eta_span: f64) -> Self {
        Self {
            w_min: center.w - 0.5 * w_span,
            w_max: center.w + 0.5 * w_span,
            eta_min: center.eta - 0.5 * eta_span,
            eta_max: center.eta + 0.5 * eta_span,
        }
    }

    fn validate(&self) -> Result<(), SectionError> {
        let sides = [self.w_min, self.w_max, self.eta_min, self.eta_max];
        if sides.iter().any(|v| !v.is_finite())
            || self.w_max <= self.w_min
            || self.eta_max <= self.eta_min
        {
            return Err(SectionError::InvalidRegion(format!(
                "degenerate rectangle [{}, {}] x [{}, {}]",
                self.w_min, self.w_max, self.eta_min, self.eta_max
            )));
        }
        Ok(())
    }
}

/// Norm used for contraction ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionNorm {
    /// Three-component norm on the plane, including the induced ice-line
    /// difference.
    SigmaEmbedded,
    /// Two-component (w, η) norm.
    Planar,
}

/// Result of a Monte Carlo contraction sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionEstimate {
    /// Max over sampled pairs of image distance over preimage distance.
    pub factor: f64,
    pub pairs_used: usize,
    pub pairs_excluded: usize,
}

impl SectionContext {
    /// Estimate the contraction factor of one section map over a rectangle
    /// by sampling point pairs. Pairs with an endpoint outside the map's
    /// domain (or whose map application fails) are excluded and counted.
    pub fn estimate_contraction(
        &self,
        region: &SectionRegion,
        map: SectionMapChoice,
        n_pairs: usize,
        norm: SectionNorm,
        rng_seed: u64,
    ) -> Result<ContractionEstimate, SectionError> {
        region.validate()?;
        if n_pairs == 0 {
            return Err(SectionError::InvalidRegion("n_pairs must be positive".into()));
        }
        let p = *self.params();
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let sample = |rng: &mut ChaCha8Rng| {
            SectionPoint::new(
                rng.random_range(region.w_min..region.w_max),
                rng.random_range(region.eta_min..region.eta_max),
            )
        };
        let dist = |a: &SectionPoint, b: &SectionPoint| match norm {
            SectionNorm::SigmaEmbedded => a.distance(b, &p),
            SectionNorm::Planar => a.planar_distance(b),
        };

        let mut factor: f64 = 0.0;
        let mut pairs_used = 0;
        let mut pairs_excluded = 0;
        for _ in 0..n_pairs {
            let x1 = sample(&mut rng);
            let x2 = sample(&mut rng);
            if dist(&x1, &x2) == 0.0 {
                pairs_excluded += 1;
                continue;
            }
            if !self.is_admissible(&x1, map) || !self.is_admissible(&x2, map) {
                pairs_excluded += 1;
                continue;
            }
            let apply = |pt: &SectionPoint| match map {
                SectionMapChoice::Minus => self.map_minus(pt),
                SectionMapChoice::Plus => self.map_plus(pt),
            };
            match (apply(&x1), apply(&x2)) {
                (Ok((y1, _)), Ok((y2, _))) => {
                    factor = factor.max(dist(&y1, &y2) / dist(&x1, &x2));
                    pairs_used += 1;
                }
                _ => pairs_excluded += 1,
            }
        }
        if pairs_used == 0 {
            return Err(SectionError::NotAdmissible(format!(
                "no admissible pairs among {n_pairs} sampled in the region"
            )));
        }
        Ok(ContractionEstimate {
            factor,
            pairs_used,
            pairs_excluded,
        })
    }
}

/// Monte Carlo contraction estimate with a fresh context.
pub fn estimate_contraction(
    region: &SectionRegion,
    map: SectionMapChoice,
    n_pairs: usize,
    norm: SectionNorm,
    rng_seed: u64,
    p: &ModelParameters,
    cfg: &IntegratorConfig,
) -> Result<ContractionEstimate, SectionError> {
    SectionContext::new(*p, *cfg)?.estimate_contraction(region, map, n_pairs, norm, rng_seed)
}
