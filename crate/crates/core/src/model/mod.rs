//! The closed-form model: parameters, state space, regime vector fields,
//! switching-plane geometry, equilibria, and the quadratic-profile
//! reduction used as a cross-check.

mod equilibria;
mod formulas;
mod params;
mod reduction;
mod state;

pub use equilibria::{
    equilibrium_residual, find_equilibria, find_planar_equilibria, lift_equilibrium,
    Classification, EquilibriumReport, PlanarEquilibrium, Stability,
};
pub use formulas::{
    classify_boundary_point, epsilon_bound, eta_nullcline, eta_nullcline_deriv,
    insolation_distribution, jacobian, legendre_p2, legendre_p2_integral, sigma_normal,
    switching_function, switching_ice_line, tangency_curve, tangency_intersection_eta,
    vector_field, w_nullcline, w_nullcline_deriv, BoundaryClass,
};
pub use params::ModelParameters;
pub use reduction::{four_ode_rhs, invariant_line_coords};
pub use state::{Regime, State};

/// Errors from the closed-form layer.
#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("{what} = {value} outside [0, 1]")]
    DomainError { what: &'static str, value: f64 },
    #[error("point is not on the switching plane: |h| = {offset:e} exceeds tolerance {tol:e}")]
    NotOnBoundary { offset: f64, tol: f64 },
}
