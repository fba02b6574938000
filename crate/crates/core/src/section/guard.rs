//! The guard set: the part of the switching plane above the stable
//! manifold of the advance-regime planar saddle. Both section maps are
//! provably defined there; outside it trajectories may escape toward the
//! snowball branch instead of returning to the plane.

use crate::integrator::IntegratorConfig;
use crate::model::{
    eta_nullcline, find_planar_equilibria, w_nullcline, w_nullcline_deriv, ModelParameters,
    Regime, Stability,
};

use super::{maps::SectionPoint, SectionError};

/// Offset along the stable eigendirection used to seed the two branches.
const SEED_OFFSET: f64 = 1e-6;
/// Backward-integration caps: the separatrix is tabulated while w stays in
/// this window and the snow line stays near the physical interval.
const W_CAP: (f64, f64) = (-60.0, 30.0);
const ETA_CAP: (f64, f64) = (-0.25, 1.3);
/// Fixed backward step and a hard budget per branch.
const BACK_STEP: f64 = 1e-3;
const MAX_BACK_STEPS: usize = 2_000_000;
/// Minimum snow-line spacing between stored table nodes.
const TABLE_SPACING: f64 = 2.5e-4;

/// The planar advance-saddle separatrix, tabulated as a curve w = m(η), and
/// the membership test "above the curve".
#[derive(Debug, Clone)]
pub struct GuardSet {
    etas: Vec<f64>,
    ws: Vec<f64>,
    saddle: (f64, f64),
}

fn planar_advance_field(w: f64, eta: f64, p: &ModelParameters) -> (f64, f64) {
    (
        -p.tau * (w - w_nullcline(eta, p)),
        p.rho * (w - eta_nullcline(eta, Regime::Advance, p)),
    )
}

/// Classical RK4 step of the time-reversed planar advance flow.
fn backward_step(w: f64, eta: f64, dt: f64, p: &ModelParameters) -> (f64, f64) {
    let f = |w: f64, eta: f64| {
        let (dw, de) = planar_advance_field(w, eta, p);
        (-dw, -de)
    };
    let (k1w, k1e) = f(w, eta);
    let (k2w, k2e) = f(w + 0.5 * dt * k1w, eta + 0.5 * dt * k1e);
    let (k3w, k3e) = f(w + 0.5 * dt * k2w, eta + 0.5 * dt * k2e);
    let (k4w, k4e) = f(w + dt * k3w, eta + dt * k3e);
    (
        w + dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w),
        eta + dt / 6.0 * (k1e + 2.0 * k2e + 2.0 * k3e + k4e),
    )
}

impl GuardSet {
    /// Trace the saddle's stable manifold by backward integration from small
    /// offsets along the stable eigendirection and tabulate it over η.
    ///
    /// The table depends only on the planar advance subsystem, so it can be
    /// shared across runs that vary the ablation rates or ε.
    pub fn compute(p: &ModelParameters, _cfg: &IntegratorConfig) -> Result<Self, SectionError> {
        p.validate().map_err(SectionError::Model)?;
        let planar = find_planar_equilibria(Regime::Advance, p);
        let saddle = planar
            .iter()
            .find(|e| e.stability == Stability::Saddle)
            .ok_or(SectionError::GuardUnavailable)?;

        // Stable eigenvector of [[−τ, τF′], [ρ, −ρG′]]: for eigenvalue λ the
        // direction (τF′, λ + τ) works whenever F′ ≠ 0.
        let lambda = saddle
            .eigenvalues
            .iter()
            .filter(|l| l.im == 0.0 && l.re < 0.0)
            .map(|l| l.re)
            .next()
            .ok_or(SectionError::GuardUnavailable)?;
        let vx = p.tau * w_nullcline_deriv(saddle.eta, p);
        let vy = lambda + p.tau;
        let norm = (vx * vx + vy * vy).sqrt();
        if norm == 0.0 {
            return Err(SectionError::GuardUnavailable);
        }
        let dir = (vx / norm, vy / norm);

        let mut nodes: Vec<(f64, f64)> = vec![(saddle.eta, saddle.w)];
        for side in [1.0, -1.0] {
            let mut w = saddle.w + side * SEED_OFFSET * dir.0;
            let mut eta = saddle.eta + side * SEED_OFFSET * dir.1;
            let mut last_eta = eta;
            for _ in 0..MAX_BACK_STEPS {
                let (nw, ne) = backward_step(w, eta, BACK_STEP, p);
                w = nw;
                eta = ne;
                if (eta - last_eta).abs() >= TABLE_SPACING {
                    nodes.push((eta, w));
                    last_eta = eta;
                }
                if w < W_CAP.0 || w > W_CAP.1 || eta < ETA_CAP.0 || eta > ETA_CAP.1 {
                    nodes.push((eta, w));
                    break;
                }
            }
        }

        nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
        nodes.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12);
        if nodes.len() < 10 {
            return Err(SectionError::GuardUnavailable);
        }
        Ok(Self {
            etas: nodes.iter().map(|n| n.0).collect(),
            ws: nodes.iter().map(|n| n.1).collect(),
            saddle: (saddle.w, saddle.eta),
        })
    }

    /// Separatrix height m(η), linearly interpolated and clamped to the
    /// tabulated range.
    pub fn separatrix_w(&self, eta: f64) -> f64 {
        let n = self.etas.len();
        if eta <= self.etas[0] {
            return self.ws[0];
        }
        if eta >= self.etas[n - 1] {
            return self.ws[n - 1];
        }
        let idx = self.etas.partition_point(|e| *e < eta);
        let (e0, e1) = (self.etas[idx - 1], self.etas[idx]);
        let (w0, w1) = (self.ws[idx - 1], self.ws[idx]);
        w0 + (w1 - w0) * (eta - e0) / (e1 - e0)
    }

    /// True iff the point lies strictly above the separatrix. Points on the
    /// curve itself are reported outside.
    pub fn contains(&self, x: &SectionPoint) -> bool {
        x.w > self.separatrix_w(x.eta)
    }

    /// The planar advance saddle (w, η) the manifold emanates from.
    pub fn saddle(&self) -> (f64, f64) {
        self.saddle
    }

    /// Tabulated η range.
    pub fn eta_range(&self) -> (f64, f64) {
        (self.etas[0], *self.etas.last().unwrap())
    }
}

/// Whether a section point lies in the guard set. Convenience wrapper that
/// tabulates the separatrix on every call; reuse [`GuardSet`] in loops.
pub fn guard_set_membership(
    x: &SectionPoint,
    p: &ModelParameters,
    cfg: &IntegratorConfig,
) -> Result<bool, SectionError> {
    Ok(GuardSet::compute(p, cfg)?.contains(x))
}
