//! The four-equation quadratic-profile reduction, retained as a validation
//! oracle for the closed-form curves of the planar model.
//!
//! The coefficients (w0, z0, w2, z2) parametrize even piecewise-quadratic
//! temperature profiles. For frozen snow line the system relaxes onto an
//! invariant line on which the w0 dynamics collapse to the single relaxation
//! equation toward the w-nullcline.

use super::formulas::legendre_p2_integral;
use super::ModelParameters;

/// Equilibrium values (z0, w2, z2) of the invariant line.
pub fn invariant_line_coords(p: &ModelParameters) -> (f64, f64, f64) {
    let l = p.l();
    (
        l * p.albedo_contrast(),
        l * p.s2 * (1.0 - p.alpha0()),
        l * p.s2 * p.albedo_contrast(),
    )
}

/// Right-hand side of the four-equation reduction at frozen snow line, with
/// the heat capacity normalized so that B/R equals the configured tau.
pub fn four_ode_rhs(coords: [f64; 4], eta: f64, p: &ModelParameters) -> [f64; 4] {
    let [w0, z0, w2, z2] = coords;
    let r = p.b_olr / p.tau;
    let bc = p.b_olr + p.c_transport;
    let transport = p.c_transport * ((eta - 0.5) * z0 + z2 * legendre_p2_integral(eta));
    [
        (p.q * (1.0 - p.alpha0()) - p.a_olr - p.b_olr * w0 + transport) / r,
        (p.q * p.albedo_contrast() - bc * z0) / r,
        (p.q * p.s2 * (1.0 - p.alpha0()) - bc * w2) / r,
        (p.q * p.s2 * p.albedo_contrast() - bc * z2) / r,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::w_nullcline;

    fn p() -> ModelParameters {
        ModelParameters::standard()
    }

    #[test]
    fn invariant_line_reference_values() {
        let (z0, w2, z2) = invariant_line_coords(&p());
        assert!((z0 - 20.82995951417004).abs() < 1e-12);
        assert!((w2 - (-17.737404858299595)).abs() < 1e-12);
        assert!((z2 - (-10.04004048582996)).abs() < 1e-12);
    }

    #[test]
    fn no_albedo_contrast_kills_the_line() {
        let p = ModelParameters {
            alpha1: 0.47,
            alpha2: 0.47 + 1e-12,
            ..ModelParameters::standard()
        };
        let (z0, _, z2) = invariant_line_coords(&p);
        assert!(z0.abs() < 1e-9 && z2.abs() < 1e-9);
    }

    #[test]
    fn rhs_vanishes_on_the_line_at_the_nullcline() {
        let p = p();
        let (z0, w2, z2) = invariant_line_coords(&p);
        for i in 0..=10 {
            let eta = i as f64 / 10.0;
            let rates = four_ode_rhs([w_nullcline(eta, &p), z0, w2, z2], eta, &p);
            for r in rates {
                assert!(r.abs() < 1e-10, "eta = {eta}, rate = {r}");
            }
        }
    }

    #[test]
    fn z_block_ignores_w0_and_eta() {
        let p = p();
        let a = four_ode_rhs([3.0, 1.0, 2.0, -1.0], 0.2, &p);
        let b = four_ode_rhs([-11.0, 1.0, 2.0, -1.0], 0.9, &p);
        for k in 1..4 {
            assert_eq!(a[k], b[k]);
        }
    }

    #[test]
    fn z0_relaxes_to_the_line_with_known_rate() {
        // The z0 equation is scalar linear: ż0 = ((B+C)/R)(z0* − z0).
        let p = p();
        let (z0_star, w2_star, z2_star) = invariant_line_coords(&p);
        let rate = (p.b_olr + p.c_transport) / (p.b_olr / p.tau);
        let mut coords = [0.0, z0_star + 5.0, w2_star, z2_star];
        let eta = 0.5;
        let dt = 1e-4;
        let t_end = 3.0;
        let steps = (t_end / dt) as usize;
        for _ in 0..steps {
            // classical RK4 on the 4-vector
            let k1 = four_ode_rhs(coords, eta, &p);
            let add = |c: [f64; 4], k: [f64; 4], s: f64| {
                [c[0] + s * k[0], c[1] + s * k[1], c[2] + s * k[2], c[3] + s * k[3]]
            };
            let k2 = four_ode_rhs(add(coords, k1, 0.5 * dt), eta, &p);
            let k3 = four_ode_rhs(add(coords, k2, 0.5 * dt), eta, &p);
            let k4 = four_ode_rhs(add(coords, k3, dt), eta, &p);
            for i in 0..4 {
                coords[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        let expected = z0_star + 5.0 * (-rate * t_end).exp();
        assert!(
            (coords[1] - expected).abs() < 1e-8,
            "z0 = {}, closed form = {expected}",
            coords[1]
        );
    }
}
