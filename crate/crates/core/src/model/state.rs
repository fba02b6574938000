//! State space and regime labels.

use serde::{Deserialize, Serialize};

use super::ModelParameters;

/// A point (w, η, ξ) of the model space: translated global mean temperature,
/// snow line, and ice line (both lines as sine of latitude).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    /// Translated global mean surface temperature (°C).
    pub w: f64,
    /// Snow line η ∈ [0,1].
    pub eta: f64,
    /// Ice line ξ ∈ [0,1].
    pub xi: f64,
}

impl State {
    pub fn new(w: f64, eta: f64, xi: f64) -> Self {
        Self { w, eta, xi }
    }

    /// Whether the point lies in the model domain (η and ξ inside [0,1];
    /// w is unconstrained).
    pub fn in_domain(&self) -> bool {
        (0.0..=1.0).contains(&self.eta) && (0.0..=1.0).contains(&self.xi)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.w, self.eta, self.xi]
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    /// Euclidean distance to another state.
    pub fn distance(&self, other: &State) -> f64 {
        let dw = self.w - other.w;
        let de = self.eta - other.eta;
        let dx = self.xi - other.xi;
        (dw * dw + de * de + dx * dx).sqrt()
    }
}

/// The two climate regimes of the discontinuous vector field.
///
/// `Advance` is active where accumulation exceeds ablation (the half-space
/// with negative switching offset) and couples the slower ablation rate `b0`
/// with the warmer critical temperature `tc_minus`. `Retreat` is the mirror
/// case with `b1` and `tc_plus`. No other pairing is representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Advance,
    Retreat,
}

impl Regime {
    /// Ablation rate of this regime's ice-line equation.
    pub fn ablation(&self, p: &ModelParameters) -> f64 {
        match self {
            Regime::Advance => p.b0,
            Regime::Retreat => p.b1,
        }
    }

    /// Critical temperature entering this regime's snow-line equation.
    pub fn critical_temp(&self, p: &ModelParameters) -> f64 {
        match self {
            Regime::Advance => p.tc_minus,
            Regime::Retreat => p.tc_plus,
        }
    }

    /// Sign of the switching function on this regime's own half-space:
    /// negative for `Advance` (S−), positive for `Retreat` (S+).
    pub fn home_sign(&self) -> f64 {
        match self {
            Regime::Advance => -1.0,
            Regime::Retreat => 1.0,
        }
    }

    pub fn opposite(&self) -> Regime {
        match self {
            Regime::Advance => Regime::Retreat,
            Regime::Retreat => Regime::Advance,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::Advance => "advance",
            Regime::Retreat => "retreat",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "advance" => Ok(Regime::Advance),
            "retreat" => Ok(Regime::Retreat),
            other => Err(format!("unknown regime '{other}' (expected advance|retreat)")),
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_selects_correct_constants() {
        let p = ModelParameters::standard();
        assert_eq!(Regime::Advance.ablation(&p), 1.5);
        assert_eq!(Regime::Advance.critical_temp(&p), -5.5);
        assert_eq!(Regime::Retreat.ablation(&p), 5.0);
        assert_eq!(Regime::Retreat.critical_temp(&p), -10.0);
    }

    #[test]
    fn domain_membership() {
        assert!(State::new(-40.0, 0.0, 1.0).in_domain());
        assert!(!State::new(0.0, 1.2, 0.5).in_domain());
        assert!(!State::new(0.0, 0.5, -0.01).in_domain());
    }

    #[test]
    fn regime_round_trips_through_labels() {
        for r in [Regime::Advance, Regime::Retreat] {
            assert_eq!(r.label().parse::<Regime>().unwrap(), r);
        }
    }
}
