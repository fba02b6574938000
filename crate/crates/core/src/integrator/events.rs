//! Boundary-crossing refinement and the Filippov convex combination on the
//! switching plane.

use crate::model::{
    sigma_normal, switching_function, vector_field, ModelError, ModelParameters, Regime, State,
};

use super::step::propagate;
use super::{IntegratorConfig, IntegratorError, MAX_BISECTIONS};

/// Refine a boundary crossing inside one integration step by bisection on
/// re-propagated sub-intervals. `state_after` must be the result of
/// propagating `state_before` by `dt` under the given regime and the
/// switching function must change sign across the step.
///
/// Returns the crossing as a fraction of `dt` together with the located
/// state, whose switching offset is within `event_tol`.
pub fn locate_crossing(
    state_before: &State,
    state_after: &State,
    dt: f64,
    regime: Regime,
    p: &ModelParameters,
    cfg: &IntegratorConfig,
) -> Result<(f64, State), IntegratorError> {
    let h_before = switching_function(state_before, p);
    let h_after = switching_function(state_after, p);
    if h_before.abs() <= cfg.event_tol {
        // Already on the plane at the step start.
        return Ok((0.0, *state_before));
    }
    if h_before.signum() == h_after.signum() && h_after.abs() > cfg.event_tol {
        return Err(IntegratorError::NoSignChange);
    }

    // Bisect down to a hard time-window floor rather than stopping at the
    // |h| tolerance: slow crossings would otherwise leave time jitter of
    // event_tol/|dh/dt| in the landing point, which stalls fixed-point
    // iterations of the section maps.
    let window_floor = 1e-13 / dt.max(1e-30);
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let sign_lo = h_before.signum();
    let mut iterations = 0;
    while hi - lo > window_floor && iterations < MAX_BISECTIONS {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let s_mid = propagate(state_before, regime, mid * dt, p, cfg)?;
        let h_mid = switching_function(&s_mid, p);
        if h_mid == 0.0 {
            return Ok((mid, s_mid));
        }
        if h_mid.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    let s_mid = propagate(state_before, regime, mid * dt, p, cfg)?;
    if switching_function(&s_mid, p).abs() <= cfg.event_tol {
        Ok((mid, s_mid))
    } else {
        Err(IntegratorError::BisectionStalled(iterations))
    }
}

/// Filippov's convex combination on the switching plane: the vector
/// (1−q)V− + qV+ with q chosen so the result is tangent to the plane.
/// Defined only where the two fields disagree about the crossing direction
/// (the sliding set and its bounding tangency curves).
pub fn filippov_sliding_field(
    state: &State,
    p: &ModelParameters,
    tol: f64,
) -> Result<([f64; 3], f64), IntegratorError> {
    let h = switching_function(state, p);
    if h.abs() > tol {
        return Err(IntegratorError::Model(ModelError::NotOnBoundary {
            offset: h,
            tol,
        }));
    }
    let n = sigma_normal(p);
    let v_minus = vector_field(state, Regime::Advance, p);
    let v_plus = vector_field(state, Regime::Retreat, p);
    let dot = |v: &[f64; 3]| v[0] * n[0] + v[1] * n[1] + v[2] * n[2];
    let d_minus = dot(&v_minus);
    let d_plus = dot(&v_plus);
    // (1−q)·d_minus + q·d_plus = 0
    let denom = d_minus - d_plus;
    if denom == 0.0 {
        return Err(IntegratorError::NotSliding);
    }
    // Allow rounding slack at the tangency endpoints, where one field's
    // normal component vanishes.
    let q = d_minus / denom;
    if !(-1e-9..=1.0 + 1e-9).contains(&q) {
        return Err(IntegratorError::NotSliding);
    }
    let q = q.clamp(0.0, 1.0);
    let field = [
        (1.0 - q) * v_minus[0] + q * v_plus[0],
        (1.0 - q) * v_minus[1] + q * v_plus[1],
        (1.0 - q) * v_minus[2] + q * v_plus[2],
    ];
    Ok((field, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{switching_ice_line, tangency_curve};

    fn p() -> ModelParameters {
        ModelParameters::standard()
    }

    fn on_sigma(w: f64, eta: f64, p: &ModelParameters) -> State {
        State::new(w, eta, switching_ice_line(eta, p))
    }

    #[test]
    fn sliding_weight_endpoints() {
        let p = p();
        let eta = 0.5;
        let tol = 1e-9;
        let g_plus = tangency_curve(eta, Regime::Retreat, &p);
        let g_minus = tangency_curve(eta, Regime::Advance, &p);
        let (_, q_plus) = filippov_sliding_field(&on_sigma(g_plus, eta, &p), &p, tol).unwrap();
        assert!((q_plus - 1.0).abs() < 1e-9);
        let (_, q_minus) = filippov_sliding_field(&on_sigma(g_minus, eta, &p), &p, tol).unwrap();
        assert!(q_minus.abs() < 1e-9);
    }

    #[test]
    fn sliding_interior_is_tangent() {
        let p = p();
        let n = sigma_normal(&p);
        for i in 1..10 {
            let eta = i as f64 / 10.0;
            let g_plus = tangency_curve(eta, Regime::Retreat, &p);
            let g_minus = tangency_curve(eta, Regime::Advance, &p);
            let w = g_plus + 0.3 * (g_minus - g_plus);
            let (field, q) = filippov_sliding_field(&on_sigma(w, eta, &p), &p, 1e-9).unwrap();
            assert!(q > 0.0 && q < 1.0);
            let dot = field[0] * n[0] + field[1] * n[1] + field[2] * n[2];
            assert!(dot.abs() < 1e-10, "eta = {eta}, dot = {dot}");
        }
    }

    #[test]
    fn transversal_points_are_not_sliding() {
        let p = p();
        let eta = 0.5;
        let g_plus = tangency_curve(eta, Regime::Retreat, &p);
        let below = on_sigma(g_plus - 5.0, eta, &p);
        assert!(matches!(
            filippov_sliding_field(&below, &p, 1e-9),
            Err(IntegratorError::NotSliding)
        ));
        let g_minus = tangency_curve(eta, Regime::Advance, &p);
        let above = on_sigma(g_minus + 5.0, eta, &p);
        assert!(matches!(
            filippov_sliding_field(&above, &p, 1e-9),
            Err(IntegratorError::NotSliding)
        ));
    }

    #[test]
    fn off_plane_rejected() {
        let p = p();
        let s = State::new(0.0, 0.5, 0.9);
        assert!(filippov_sliding_field(&s, &p, 1e-9).is_err());
    }

    #[test]
    fn crossing_location_is_tolerance_insensitive() {
        // Walk the retreat flow from S+ until the switching function flips,
        // then refine the crossing inside the bracketing interval at two
        // different event tolerances.
        let p = p();
        let eta = 0.6;
        let w = tangency_curve(eta, Regime::Retreat, &p) - 2.0;
        let mut before = State::new(w, eta, switching_ice_line(eta, &p) - 0.05);
        assert!(switching_function(&before, &p) > 0.0);
        let cfg_fine = IntegratorConfig {
            event_tol: 1e-10,
            ..IntegratorConfig::default()
        };
        let dt = 0.5;
        let mut after = None;
        for _ in 0..200 {
            let next = propagate(&before, Regime::Retreat, dt, &p, &cfg_fine).unwrap();
            if switching_function(&next, &p) < 0.0 {
                after = Some(next);
                break;
            }
            before = next;
        }
        let after = after.expect("retreat flow should reach the plane");

        let cfg_coarse = IntegratorConfig {
            event_tol: 1e-6,
            ..IntegratorConfig::default()
        };
        let (f1, s1) = locate_crossing(&before, &after, dt, Regime::Retreat, &p, &cfg_coarse).unwrap();
        let (f2, s2) = locate_crossing(&before, &after, dt, Regime::Retreat, &p, &cfg_fine).unwrap();
        assert!(switching_function(&s1, &p).abs() <= 1e-6);
        assert!(switching_function(&s2, &p).abs() <= 1e-10);
        // A coarse |h| tolerance widens the admissible time window by
        // h_tol/|dh/dt| around the true crossing.
        let v = crate::model::vector_field(&s2, Regime::Retreat, &p);
        let h_rate = (p.b * (v[1] - v[2]) + p.accum * v[1]).abs();
        let window = 1e-6 + 2.0 * 1e-6 / h_rate;
        assert!(
            ((f1 - f2) * dt).abs() < window,
            "t1 = {}, t2 = {}, window = {window}",
            f1 * dt,
            f2 * dt
        );
    }

    #[test]
    fn no_sign_change_is_an_error() {
        let p = p();
        let start = State::new(5.0, 0.9, 0.5);
        let cfg = IntegratorConfig::default();
        let after = propagate(&start, Regime::Retreat, 1e-3, &p, &cfg).unwrap();
        assert!(matches!(
            locate_crossing(&start, &after, 1e-3, Regime::Retreat, &p, &cfg),
            Err(IntegratorError::NoSignChange)
        ));
    }
}
