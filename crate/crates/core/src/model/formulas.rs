//! Closed-form pieces of the model: insolation distribution, nullcline
//! curves, the switching plane, the two regime vector fields and their
//! Jacobians, and the tangency geometry on the discontinuity boundary.

use super::{ModelError, ModelParameters, Regime, State};

/// Second even Legendre polynomial p2(y) = (3y² − 1)/2.
pub fn legendre_p2(y: f64) -> f64 {
    0.5 * (3.0 * y * y - 1.0)
}

/// Antiderivative of p2 vanishing at 0: P2(y) = (y³ − y)/2.
pub fn legendre_p2_integral(y: f64) -> f64 {
    0.5 * (y * y * y - y)
}

/// Normalized insolation weight s(y) = p0(y) + s2·p2(y) at sine-latitude y.
pub fn insolation_distribution(y: f64, p: &ModelParameters) -> Result<f64, ModelError> {
    if !(0.0..=1.0).contains(&y) {
        return Err(ModelError::DomainError {
            what: "sine-latitude y",
            value: y,
        });
    }
    Ok(1.0 + p.s2 * legendre_p2(y))
}

/// The w-nullcline F(η): equilibrium mean temperature as a function of the
/// snow line. A cubic polynomial in η, identical in both regimes.
pub fn w_nullcline(eta: f64, p: &ModelParameters) -> f64 {
    let bracket = p.q * (1.0 - p.alpha0()) - p.a_olr
        + p.c_transport
            * p.l()
            * p.albedo_contrast()
            * (eta - 0.5 + p.s2 * legendre_p2_integral(eta));
    bracket / p.b_olr
}

/// dF/dη.
pub fn w_nullcline_deriv(eta: f64, p: &ModelParameters) -> f64 {
    p.c_transport * p.l() * p.albedo_contrast() * (1.0 + p.s2 * legendre_p2(eta)) / p.b_olr
}

/// The η-nullcline G(η) of the given regime: the w-value at which the snow
/// line is stationary. The advance and retreat curves differ only by the
/// constant offset tc_minus − tc_plus.
pub fn eta_nullcline(eta: f64, regime: Regime, p: &ModelParameters) -> f64 {
    -p.l() * p.s2 * (1.0 - p.alpha0()) * legendre_p2(eta) + regime.critical_temp(p)
}

/// dG/dη (regime independent).
pub fn eta_nullcline_deriv(eta: f64, p: &ModelParameters) -> f64 {
    -p.l() * p.s2 * (1.0 - p.alpha0()) * 3.0 * eta
}

/// Ice-line coordinate of the switching plane at snow line η. Written as
/// η + (a/b)(η − 1) so that the pole value is exactly 1.
pub fn switching_ice_line(eta: f64, p: &ModelParameters) -> f64 {
    eta + (p.accum / p.b) * (eta - 1.0)
}

/// Signed offset h = b(η − ξ) − a(1 − η) from the switching plane.
/// Negative on the advance half-space S−, positive on the retreat
/// half-space S+, zero on the plane itself.
pub fn switching_function(state: &State, p: &ModelParameters) -> f64 {
    p.b * (state.eta - state.xi) - p.accum * (1.0 - state.eta)
}

/// Normal vector of the switching plane, scaled as (0, 1 + a/b, −1). The
/// switching function's gradient is b times this vector.
pub fn sigma_normal(p: &ModelParameters) -> [f64; 3] {
    [0.0, 1.0 + p.accum / p.b, -1.0]
}

/// Right-hand side of the active regime: (dw/dt, dη/dt, dξ/dt).
pub fn vector_field(state: &State, regime: Regime, p: &ModelParameters) -> [f64; 3] {
    let br = regime.ablation(p);
    [
        -p.tau * (state.w - w_nullcline(state.eta, p)),
        p.rho * (state.w - eta_nullcline(state.eta, regime, p)),
        p.epsilon * (br * (state.eta - state.xi) - p.accum * (1.0 - state.eta)),
    ]
}

/// Jacobian of the regime field. The (w,η) block decouples from ξ and
/// −ε·b_r is always an eigenvalue with eigenvector (0,0,1).
pub fn jacobian(state: &State, regime: Regime, p: &ModelParameters) -> [[f64; 3]; 3] {
    let br = regime.ablation(p);
    [
        [-p.tau, p.tau * w_nullcline_deriv(state.eta, p), 0.0],
        [p.rho, -p.rho * eta_nullcline_deriv(state.eta, p), 0.0],
        [0.0, p.epsilon * (br + p.accum), -p.epsilon * br],
    ]
}

/// Tangency parabola g_r(η): the w-value on the switching plane at which the
/// regime field is tangent to the plane. Equals the η-nullcline at the pole.
pub fn tangency_curve(eta: f64, regime: Regime, p: &ModelParameters) -> f64 {
    let br = regime.ablation(p);
    eta_nullcline(eta, regime, p)
        + p.epsilon * p.accum * (1.0 - eta) * (br - p.b) / (p.rho * (p.accum + p.b))
}

/// Upper bound on ε below which the two tangency parabolas do not intersect
/// over η ∈ [0,1], so the repelling sliding strip spans the whole boundary.
pub fn epsilon_bound(p: &ModelParameters) -> f64 {
    (p.tc_minus - p.tc_plus) * p.rho * (p.accum + p.b) / (p.accum * (p.b1 - p.b0))
}

/// Snow-line coordinate η(ε) at which the tangency parabolas meet for the
/// configured ε; strictly negative exactly when ε is admissible.
pub fn tangency_intersection_eta(p: &ModelParameters) -> f64 {
    1.0 - epsilon_bound(p) / p.epsilon
}

/// Where a point of the switching plane sits relative to the crossing and
/// sliding subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryClass {
    /// w < g_+(η): both fields push from S+ into S− (transversal crossing).
    SigmaPlus,
    /// w > g_−(η): both fields push from S− into S+ (transversal crossing).
    SigmaMinus,
    /// g_+(η) < w < g_−(η): both fields point away from the plane.
    SlidingRepelling,
    /// On the retreat tangency parabola Λ+.
    TangencyPlus,
    /// On the advance tangency parabola Λ−.
    TangencyMinus,
}

impl BoundaryClass {
    pub fn label(&self) -> &'static str {
        match self {
            BoundaryClass::SigmaPlus => "sigma_plus",
            BoundaryClass::SigmaMinus => "sigma_minus",
            BoundaryClass::SlidingRepelling => "sliding_repelling",
            BoundaryClass::TangencyPlus => "tangency_plus",
            BoundaryClass::TangencyMinus => "tangency_minus",
        }
    }
}

impl std::str::FromStr for BoundaryClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "sigma_plus" => Ok(BoundaryClass::SigmaPlus),
            "sigma_minus" => Ok(BoundaryClass::SigmaMinus),
            "sliding_repelling" => Ok(BoundaryClass::SlidingRepelling),
            "tangency_plus" => Ok(BoundaryClass::TangencyPlus),
            "tangency_minus" => Ok(BoundaryClass::TangencyMinus),
            other => Err(format!("unknown boundary class '{other}'")),
        }
    }
}

impl std::fmt::Display for BoundaryClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Classify a point of the switching plane. `tol` bounds both the allowed
/// distance from the plane (precondition) and the w-band treated as tangent.
pub fn classify_boundary_point(
    state: &State,
    p: &ModelParameters,
    tol: f64,
) -> Result<BoundaryClass, ModelError> {
    let h = switching_function(state, p);
    if h.abs() > tol {
        return Err(ModelError::NotOnBoundary { offset: h, tol });
    }
    let g_plus = tangency_curve(state.eta, Regime::Retreat, p);
    let g_minus = tangency_curve(state.eta, Regime::Advance, p);
    if (state.w - g_plus).abs() <= tol {
        Ok(BoundaryClass::TangencyPlus)
    } else if (state.w - g_minus).abs() <= tol {
        Ok(BoundaryClass::TangencyMinus)
    } else if state.w < g_plus {
        Ok(BoundaryClass::SigmaPlus)
    } else if state.w > g_minus {
        Ok(BoundaryClass::SigmaMinus)
    } else {
        Ok(BoundaryClass::SlidingRepelling)
    }
}
