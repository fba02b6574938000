//! Smooth-field steppers: classical RK4 and a Dormand-Prince 5(4)
//! embedded pair with standard step-size control.

use crate::model::{vector_field, ModelParameters, Regime, State};

use super::{IntegratorConfig, IntegratorError, StepMode};

#[inline]
fn axpy(s: &State, k: &[f64; 3], dt: f64) -> State {
    State::new(s.w + dt * k[0], s.eta + dt * k[1], s.xi + dt * k[2])
}

/// One classical 4-stage Runge-Kutta update of the regime field.
pub(crate) fn rk4_step(state: &State, regime: Regime, dt: f64, p: &ModelParameters) -> State {
    let k1 = vector_field(state, regime, p);
    let k2 = vector_field(&axpy(state, &k1, 0.5 * dt), regime, p);
    let k3 = vector_field(&axpy(state, &k2, 0.5 * dt), regime, p);
    let k4 = vector_field(&axpy(state, &k3, dt), regime, p);
    State::new(
        state.w + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        state.eta + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        state.xi + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    )
}

// Dormand-Prince 5(4) coefficients.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order weights coincide with the last row of A; E is the difference to
// the embedded 4th-order solution.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand-Prince 5(4) stage evaluation: the 5th-order result and the
/// scaled error-norm of the embedded difference.
fn dopri_attempt(
    state: &State,
    regime: Regime,
    dt: f64,
    p: &ModelParameters,
    cfg: &IntegratorConfig,
) -> (State, f64) {
    let mut k = [[0.0f64; 3]; 7];
    k[0] = vector_field(state, regime, p);
    for stage in 0..6 {
        let mut probe = *state;
        for (j, kj) in k.iter().enumerate().take(stage + 1) {
            let c = A[stage][j];
            if c != 0.0 {
                probe = axpy(&probe, kj, dt * c);
            }
        }
        k[stage + 1] = vector_field(&probe, regime, p);
    }
    let next = {
        let mut s = *state;
        for (j, kj) in k.iter().enumerate().take(6) {
            let c = A[5][j];
            if c != 0.0 {
                s = axpy(&s, kj, dt * c);
            }
        }
        s
    };
    let y0 = state.to_array();
    let y1 = next.to_array();
    let mut err_sq = 0.0;
    for i in 0..3 {
        let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum::<f64>() * dt;
        let scale = cfg.abs_tol + cfg.rel_tol * y0[i].abs().max(y1[i].abs());
        let r = e / scale;
        err_sq += r * r;
    }
    (next, (err_sq / 3.0).sqrt())
}

/// Step-size controller state for the adaptive mode.
pub(crate) struct Stepper {
    dt_next: f64,
}

impl Stepper {
    pub(crate) fn new(cfg: &IntegratorConfig) -> Self {
        Self {
            dt_next: cfg.base_step,
        }
    }

    /// Advance one accepted step of at most `dt_cap`, returning the new
    /// state and the step actually taken.
    pub(crate) fn step(
        &mut self,
        state: &State,
        regime: Regime,
        t: f64,
        dt_cap: f64,
        p: &ModelParameters,
        cfg: &IntegratorConfig,
    ) -> Result<(State, f64), IntegratorError> {
        match cfg.step_mode {
            StepMode::FixedClassicalRk4 => {
                let dt = cfg.base_step.min(dt_cap);
                Ok((rk4_step(state, regime, dt, p), dt))
            }
            StepMode::EmbeddedAdaptive => {
                let mut dt = self.dt_next.min(dt_cap).min(super::MAX_ADAPTIVE_STEP);
                loop {
                    if dt < 1e-14 * t.abs().max(1.0) {
                        return Err(IntegratorError::StepSizeUnderflow { t, dt });
                    }
                    let (next, err) = dopri_attempt(state, regime, dt, p, cfg);
                    if err <= 1.0 {
                        let grow = if err == 0.0 {
                            5.0
                        } else {
                            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                        };
                        self.dt_next = (dt * grow).min(super::MAX_ADAPTIVE_STEP);
                        return Ok((next, dt));
                    }
                    dt *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.5);
                }
            }
        }
    }
}

/// Integrate the smooth regime field for exactly `dt`, composing internal
/// steps as the mode requires.
pub(crate) fn propagate(
    state: &State,
    regime: Regime,
    dt: f64,
    p: &ModelParameters,
    cfg: &IntegratorConfig,
) -> Result<State, IntegratorError> {
    if dt == 0.0 {
        return Ok(*state);
    }
    match cfg.step_mode {
        StepMode::FixedClassicalRk4 => {
            let n = (dt / cfg.base_step).floor() as usize;
            let mut s = *state;
            for _ in 0..n {
                s = rk4_step(&s, regime, cfg.base_step, p);
            }
            let rem = dt - n as f64 * cfg.base_step;
            if rem > 0.0 {
                s = rk4_step(&s, regime, rem, p);
            }
            Ok(s)
        }
        StepMode::EmbeddedAdaptive => {
            let mut stepper = Stepper::new(cfg);
            let mut s = *state;
            let mut t = 0.0;
            // Stop once the remaining span is below float resolution of the
            // target; accumulated rounding can leave an unsteppable sliver.
            while dt - t > 1e-14 * dt.abs().max(1.0) {
                let (next, taken) = stepper.step(&s, regime, t, dt - t, p, cfg)?;
                s = next;
                t += taken;
            }
            Ok(s)
        }
    }
}

/// Advance the regime's smooth field across `dt`. In fixed mode this is a
/// single classical Runge-Kutta update of exactly `dt`; in adaptive mode the
/// span is covered by error-controlled substeps.
pub fn smooth_step(
    state: &State,
    regime: Regime,
    dt: f64,
    p: &ModelParameters,
    cfg: &IntegratorConfig,
) -> Result<State, IntegratorError> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(IntegratorError::InvalidConfig(format!(
            "smooth_step requires dt > 0, got {dt}"
        )));
    }
    cfg.validate()?;
    match cfg.step_mode {
        StepMode::FixedClassicalRk4 => Ok(rk4_step(state, regime, dt, p)),
        StepMode::EmbeddedAdaptive => propagate(state, regime, dt, p, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        find_planar_equilibria, lift_equilibrium, switching_ice_line, ModelParameters,
    };

    fn p() -> ModelParameters {
        ModelParameters::standard()
    }

    fn fixed_cfg(dt: f64) -> IntegratorConfig {
        IntegratorConfig {
            step_mode: StepMode::FixedClassicalRk4,
            base_step: dt,
            ..IntegratorConfig::default()
        }
    }

    fn retreat_sink_state() -> State {
        let p = p();
        let planar = find_planar_equilibria(Regime::Retreat, &p);
        lift_equilibrium(&planar[1], Regime::Retreat, &p).state
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let p = p();
        let eq = retreat_sink_state();
        let cfg = fixed_cfg(1e-2);
        let next = smooth_step(&eq, Regime::Retreat, 1e-2, &p, &cfg).unwrap();
        assert!(next.distance(&eq) < 1e-12);
    }

    #[test]
    fn rk4_local_order_exceeds_three_point_nine() {
        // Richardson order test on the retreat field: the defect between one
        // step of dt and two of dt/2 scales like dt^5.
        let p = p();
        let s0 = State::new(2.0, 0.8, 0.5);
        let mut logs: Vec<(f64, f64)> = Vec::new();
        for &dt in &[0.2, 0.1, 0.05, 0.025] {
            let one = rk4_step(&s0, Regime::Retreat, dt, &p);
            let half = rk4_step(&s0, Regime::Retreat, 0.5 * dt, &p);
            let two = rk4_step(&half, Regime::Retreat, 0.5 * dt, &p);
            logs.push((dt.ln(), one.distance(&two).ln()));
        }
        // least-squares slope
        let n = logs.len() as f64;
        let sx: f64 = logs.iter().map(|(x, _)| x).sum();
        let sy: f64 = logs.iter().map(|(_, y)| y).sum();
        let sxx: f64 = logs.iter().map(|(x, _)| x * x).sum();
        let sxy: f64 = logs.iter().map(|(x, y)| x * y).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!(slope >= 3.9, "observed order {slope}");
    }

    #[test]
    fn linear_ice_line_matches_closed_form() {
        // Start on a planar equilibrium so (w, η) stay frozen and the ice
        // line obeys a scalar linear equation with a known solution.
        let p = p();
        let eq = retreat_sink_state();
        let xi0 = 0.99;
        let rate = p.epsilon * p.b1;
        let mut s = State::new(eq.w, eq.eta, xi0);
        let cfg = fixed_cfg(1e-3);
        let t_end = 5.0;
        let steps = (t_end / 1e-3) as usize;
        for _ in 0..steps {
            s = smooth_step(&s, Regime::Retreat, 1e-3, &p, &cfg).unwrap();
        }
        let expected = eq.xi + (xi0 - eq.xi) * (-rate * t_end).exp();
        assert!((s.xi - expected).abs() < 1e-8, "xi = {}, exact = {expected}", s.xi);

        // Adaptive mode should match at least as well.
        let cfg = IntegratorConfig::default();
        let s2 = propagate(&State::new(eq.w, eq.eta, xi0), Regime::Retreat, t_end, &p, &cfg).unwrap();
        assert!((s2.xi - expected).abs() < 1e-8);
    }

    #[test]
    fn adaptive_meets_fixed_reference() {
        let p = p();
        let s0 = State::new(-3.0, 0.4, 0.6);
        let cfg_ref = fixed_cfg(1e-5);
        let reference = propagate(&s0, Regime::Advance, 2.0, &p, &cfg_ref).unwrap();
        let adaptive = propagate(&s0, Regime::Advance, 2.0, &p, &IntegratorConfig::default()).unwrap();
        assert!(adaptive.distance(&reference) < 1e-7);
    }

    #[test]
    fn zero_dt_rejected() {
        let p = p();
        let s = State::new(0.0, 0.5, 0.5);
        assert!(smooth_step(&s, Regime::Advance, 0.0, &p, &IntegratorConfig::default()).is_err());
    }

    #[test]
    fn on_sigma_ice_line_rate_sign() {
        // On the plane the ice-line balance reduces to a(1-eta)(b_r - b)/b:
        // negative for advance, positive for retreat.
        let p = p();
        let eta = 0.7;
        let s = State::new(0.0, eta, switching_ice_line(eta, &p));
        let va = crate::model::vector_field(&s, Regime::Advance, &p);
        let vr = crate::model::vector_field(&s, Regime::Retreat, &p);
        assert!(va[2] < 0.0);
        assert!(vr[2] > 0.0);
    }
}
