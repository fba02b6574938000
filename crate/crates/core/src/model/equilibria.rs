//! Equilibrium finding and classification for the two regime fields.
//!
//! Each regime's equilibria are the roots in [0,1] of the cubic-minus-
//! quadratic polynomial F(η) − G(η); the third coordinate follows from the
//! linear ice-line equation. Roots are located by a uniform sign scan plus
//! bisection — the polynomial has at most three zeros and the scan cannot
//! miss a simple root at the grid resolution used.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::formulas::{
    eta_nullcline, eta_nullcline_deriv, switching_function, vector_field, w_nullcline,
    w_nullcline_deriv,
};
use super::{ModelError, ModelParameters, Regime, State};

/// Grid spacing of the root sign scan over η ∈ [0,1].
const SCAN_STEP: f64 = 1e-3;
/// Bisection is run until the bracket is narrower than this.
const BISECT_WIDTH: f64 = 1e-12;
/// |Re λ| below this reports `Degenerate` instead of guessing a side.
const EIGENVALUE_TOL: f64 = 1e-9;
/// |h| below this at a lifted equilibrium reports `Boundary`.
const BOUNDARY_TOL: f64 = 1e-9;

/// Sign structure of the eigenvalue real parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Sink,
    Saddle,
    Source,
    Degenerate,
}

/// Position of an equilibrium relative to its own regime's half-space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    /// The equilibrium lies in the half-space where its field is active.
    Regular,
    /// The equilibrium lies strictly in the opposite half-space and cannot
    /// be reached by its own flow.
    Virtual,
    /// The equilibrium lies on the switching plane (within tolerance).
    Boundary,
}

/// An equilibrium of the planar (w, η) subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarEquilibrium {
    pub w: f64,
    pub eta: f64,
    /// Eigenvalues of the 2×2 block of the Jacobian.
    pub eigenvalues: [Complex64; 2],
    pub stability: Stability,
}

/// A full three-dimensional equilibrium with eigenstructure and its
/// regular/virtual/boundary classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub state: State,
    pub regime: Regime,
    pub eigenvalues: [Complex64; 3],
    pub stability: Stability,
    pub classification: Classification,
}

fn stability_from_real_parts(real_parts: &[f64]) -> Stability {
    if real_parts.iter().any(|r| r.abs() <= EIGENVALUE_TOL) {
        return Stability::Degenerate;
    }
    let negatives = real_parts.iter().filter(|r| **r < 0.0).count();
    if negatives == real_parts.len() {
        Stability::Sink
    } else if negatives == 0 {
        Stability::Source
    } else {
        Stability::Saddle
    }
}

/// Eigenvalues of [[−τ, τF′], [ρ, −ρG′]] at the given snow line.
fn planar_eigenvalues(eta: f64, regime: Regime, p: &ModelParameters) -> [Complex64; 2] {
    let _ = regime; // G′ is regime independent; kept for call-site clarity
    let trace = -(p.tau + p.rho * eta_nullcline_deriv(eta, p));
    let det = -p.tau * p.rho * (w_nullcline_deriv(eta, p) - eta_nullcline_deriv(eta, p));
    let disc = trace * trace - 4.0 * det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [
            Complex64::new(0.5 * (trace + s), 0.0),
            Complex64::new(0.5 * (trace - s), 0.0),
        ]
    } else {
        let s = (-disc).sqrt();
        [
            Complex64::new(0.5 * trace, 0.5 * s),
            Complex64::new(0.5 * trace, -0.5 * s),
        ]
    }
}

/// All equilibria of the planar (w, η) subsystem of the given regime with
/// η ∈ [0,1]. Returns an empty list when the nullclines do not intersect.
pub fn find_planar_equilibria(regime: Regime, p: &ModelParameters) -> Vec<PlanarEquilibrium> {
    let gap = |eta: f64| w_nullcline(eta, p) - eta_nullcline(eta, regime, p);
    let n = (1.0 / SCAN_STEP).round() as usize;
    let mut roots: Vec<f64> = Vec::new();

    let mut prev_eta = 0.0;
    let mut prev = gap(0.0);
    if prev == 0.0 {
        roots.push(0.0);
    }
    for i in 1..=n {
        let eta = i as f64 / n as f64;
        let cur = gap(eta);
        if cur == 0.0 {
            roots.push(eta);
        } else if prev != 0.0 && prev.signum() != cur.signum() {
            let (mut lo, mut hi) = (prev_eta, eta);
            let mut f_lo = prev;
            while hi - lo > BISECT_WIDTH {
                let mid = 0.5 * (lo + hi);
                let f_mid = gap(mid);
                if f_mid == 0.0 {
                    lo = mid;
                    hi = mid;
                } else if f_lo.signum() == f_mid.signum() {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_eta = eta;
        prev = cur;
    }

    roots
        .into_iter()
        .map(|eta| {
            let eigenvalues = planar_eigenvalues(eta, regime, p);
            let real_parts = [eigenvalues[0].re, eigenvalues[1].re];
            PlanarEquilibrium {
                w: w_nullcline(eta, p),
                eta,
                eigenvalues,
                stability: stability_from_real_parts(&real_parts),
            }
        })
        .collect()
}

/// Lift a planar equilibrium to the full space: the ice line settles at
/// ξ* = (1 + a/b_r)η* − a/b_r, the eigenvalue −ε·b_r joins the planar pair,
/// and the position relative to the switching plane gives the
/// regular/virtual/boundary classification.
pub fn lift_equilibrium(
    planar: &PlanarEquilibrium,
    regime: Regime,
    p: &ModelParameters,
) -> EquilibriumReport {
    let br = regime.ablation(p);
    let xi = planar.eta + (p.accum / br) * (planar.eta - 1.0);
    let state = State::new(planar.w, planar.eta, xi);
    let eigenvalues = [
        planar.eigenvalues[0],
        planar.eigenvalues[1],
        Complex64::new(-p.epsilon * br, 0.0),
    ];
    let real_parts = [eigenvalues[0].re, eigenvalues[1].re, eigenvalues[2].re];
    let h = switching_function(&state, p);
    let classification = if h.abs() < BOUNDARY_TOL {
        Classification::Boundary
    } else if h.signum() == regime.home_sign() {
        Classification::Regular
    } else {
        Classification::Virtual
    };
    EquilibriumReport {
        state,
        regime,
        eigenvalues,
        stability: stability_from_real_parts(&real_parts),
        classification,
    }
}

/// Convenience: find and lift every equilibrium of one regime.
pub fn find_equilibria(
    regime: Regime,
    p: &ModelParameters,
) -> Result<Vec<EquilibriumReport>, ModelError> {
    p.validate()?;
    Ok(find_planar_equilibria(regime, p)
        .iter()
        .map(|pl| lift_equilibrium(pl, regime, p))
        .collect())
}

/// Residual norm of the regime field at a reported equilibrium.
pub fn equilibrium_residual(report: &EquilibriumReport, p: &ModelParameters) -> f64 {
    let v = vector_field(&report.state, report.regime, p);
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}
