//! Physical and empirical constants of the model, with the standard values
//! used throughout the experiments.

use serde::{Deserialize, Serialize};

use super::ModelError;

/// All constants of the energy-balance / ice-sheet model.
///
/// The two climate regimes share every entry except the ablation rate
/// (`b0` while advancing, `b1` while retreating) and the critical
/// temperature (`tc_minus` / `tc_plus`). The periodic-orbit analysis
/// assumes `b0 < b < b1`; that ordering is deliberately *not* enforced so
/// that boundary-equilibrium sweeps can push `b0` through `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParameters {
    /// Mean annual insolation Q (W/m²).
    pub q: f64,
    /// Outgoing longwave radiation offset A (W/m²).
    pub a_olr: f64,
    /// Outgoing longwave radiation slope B (W/m²/°C).
    pub b_olr: f64,
    /// Meridional heat-transport coefficient C (W/m²/°C).
    pub c_transport: f64,
    /// Albedo of ice-free surface, α1.
    pub alpha1: f64,
    /// Albedo of ice-covered surface, α2 (> α1).
    pub alpha2: f64,
    /// Critical temperature in the retreat regime, T_c^+ (°C).
    pub tc_plus: f64,
    /// Critical temperature in the advance regime, T_c^- (°C, warmer than T_c^+).
    pub tc_minus: f64,
    /// Snow accumulation rate a (dimensionless).
    pub accum: f64,
    /// Ablation rate while the ice sheet advances, b0.
    pub b0: f64,
    /// Ablation rate in the switching balance that defines the boundary plane, b.
    pub b: f64,
    /// Ablation rate while the ice sheet retreats, b1.
    pub b1: f64,
    /// Relaxation rate of the mean temperature variable w (1/s).
    pub tau: f64,
    /// Relaxation rate of the snow line η (1/(s·°C)).
    pub rho: f64,
    /// Time constant of the ice line ξ (1/s); the slow, singular parameter.
    pub epsilon: f64,
    /// Second Legendre coefficient of the insolation distribution (s0 is fixed at 1).
    pub s2: f64,
}

impl Default for ModelParameters {
    fn default() -> Self {
        Self::standard()
    }
}

impl ModelParameters {
    /// The standard parameter set used in all baseline experiments.
    ///
    /// `epsilon` has no canonical value; 0.03 is the default here and every
    /// experiment that depends on it exposes an override.
    pub fn standard() -> Self {
        Self {
            q: 343.0,
            a_olr: 202.0,
            b_olr: 1.9,
            c_transport: 3.04,
            alpha1: 0.32,
            alpha2: 0.62,
            tc_plus: -10.0,
            tc_minus: -5.5,
            accum: 1.05,
            b0: 1.5,
            b: 1.75,
            b1: 5.0,
            tau: 1.0,
            rho: 0.1,
            epsilon: 0.03,
            s2: -0.482,
        }
    }

    /// L = Q/(B+C), the radiative length scale of the temperature profile.
    pub fn l(&self) -> f64 {
        self.q / (self.b_olr + self.c_transport)
    }

    /// α0 = (α1+α2)/2, the albedo averaged across the snow line.
    pub fn alpha0(&self) -> f64 {
        0.5 * (self.alpha1 + self.alpha2)
    }

    /// α2 − α1, the ice-albedo contrast.
    pub fn albedo_contrast(&self) -> f64 {
        self.alpha2 - self.alpha1
    }

    /// Check every hard invariant; called by all public entry points that
    /// accept externally supplied parameters.
    pub fn validate(&self) -> Result<(), ModelError> {
        let all = [
            ("Q", self.q),
            ("A", self.a_olr),
            ("B", self.b_olr),
            ("C", self.c_transport),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("Tc_plus", self.tc_plus),
            ("Tc_minus", self.tc_minus),
            ("a", self.accum),
            ("b0", self.b0),
            ("b", self.b),
            ("b1", self.b1),
            ("tau", self.tau),
            ("rho", self.rho),
            ("epsilon", self.epsilon),
            ("s2", self.s2),
        ];
        for (name, value) in all {
            if !value.is_finite() {
                return Err(ModelError::InvalidParameters(format!(
                    "{name} must be finite, got {value}"
                )));
            }
        }
        let positive = [
            ("Q", self.q),
            ("B", self.b_olr),
            ("C", self.c_transport),
            ("a", self.accum),
            ("b0", self.b0),
            ("b", self.b),
            ("b1", self.b1),
            ("tau", self.tau),
            ("rho", self.rho),
            ("epsilon", self.epsilon),
        ];
        for (name, value) in positive {
            if value <= 0.0 {
                return Err(ModelError::InvalidParameters(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if self.alpha1 >= self.alpha2 {
            return Err(ModelError::InvalidParameters(format!(
                "degenerate albedo: alpha1 = {} must be strictly below alpha2 = {}",
                self.alpha1, self.alpha2
            )));
        }
        if self.tc_minus <= self.tc_plus {
            return Err(ModelError::InvalidParameters(format!(
                "Tc_minus = {} must exceed Tc_plus = {} (the advance regime uses the warmer threshold)",
                self.tc_minus, self.tc_plus
            )));
        }
        Ok(())
    }
}
