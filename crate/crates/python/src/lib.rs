//! Python bindings for the glacial-cycles model: parameters, closed-form
//! curves, equilibria, hybrid simulation, and the periodic-orbit search.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use glacial_cycles::experiments::retreat_sink_projection;
use glacial_cycles::integrator::{evolve_hybrid, IntegratorConfig, StepMode};
use glacial_cycles::model::{self, ModelParameters, Regime, State};
use glacial_cycles::section::{OrbitOptions, SectionContext, SectionPoint};

/// Model parameters with the standard experiment values as defaults.
/// Attributes are plain floats and can be assigned directly.
#[pyclass(get_all, set_all, from_py_object)]
#[derive(Clone)]
struct Params {
    q: f64,
    a_olr: f64,
    b_olr: f64,
    c_transport: f64,
    alpha1: f64,
    alpha2: f64,
    tc_plus: f64,
    tc_minus: f64,
    accum: f64,
    b0: f64,
    b: f64,
    b1: f64,
    tau: f64,
    rho: f64,
    epsilon: f64,
    s2: f64,
}

impl From<&Params> for ModelParameters {
    fn from(p: &Params) -> Self {
        ModelParameters {
            q: p.q,
            a_olr: p.a_olr,
            b_olr: p.b_olr,
            c_transport: p.c_transport,
            alpha1: p.alpha1,
            alpha2: p.alpha2,
            tc_plus: p.tc_plus,
            tc_minus: p.tc_minus,
            accum: p.accum,
            b0: p.b0,
            b: p.b,
            b1: p.b1,
            tau: p.tau,
            rho: p.rho,
            epsilon: p.epsilon,
            s2: p.s2,
        }
    }
}

impl From<ModelParameters> for Params {
    fn from(p: ModelParameters) -> Self {
        Params {
            q: p.q,
            a_olr: p.a_olr,
            b_olr: p.b_olr,
            c_transport: p.c_transport,
            alpha1: p.alpha1,
            alpha2: p.alpha2,
            tc_plus: p.tc_plus,
            tc_minus: p.tc_minus,
            accum: p.accum,
            b0: p.b0,
            b: p.b,
            b1: p.b1,
            tau: p.tau,
            rho: p.rho,
            epsilon: p.epsilon,
            s2: p.s2,
        }
    }
}

fn checked(p: &Params) -> PyResult<ModelParameters> {
    let mp: ModelParameters = p.into();
    mp.validate().map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(mp)
}

fn parse_regime(name: &str) -> PyResult<Regime> {
    name.parse().map_err(PyValueError::new_err)
}

#[pymethods]
impl Params {
    /// Params(**overrides) — any attribute name can be passed as a keyword.
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut p: Params = ModelParameters::standard().into();
        if let Some(kwargs) = kwargs {
            for (key, value) in kwargs.iter() {
                let key: String = key.extract()?;
                let value: f64 = value.extract()?;
                match key.as_str() {
                    "q" => p.q = value,
                    "a_olr" => p.a_olr = value,
                    "b_olr" => p.b_olr = value,
                    "c_transport" => p.c_transport = value,
                    "alpha1" => p.alpha1 = value,
                    "alpha2" => p.alpha2 = value,
                    "tc_plus" => p.tc_plus = value,
                    "tc_minus" => p.tc_minus = value,
                    "accum" => p.accum = value,
                    "b0" => p.b0 = value,
                    "b" => p.b = value,
                    "b1" => p.b1 = value,
                    "tau" => p.tau = value,
                    "rho" => p.rho = value,
                    "epsilon" => p.epsilon = value,
                    "s2" => p.s2 = value,
                    other => {
                        return Err(PyValueError::new_err(format!(
                            "unknown parameter '{other}'"
                        )))
                    }
                }
            }
        }
        Ok(p)
    }

    /// Raise ValueError when an invariant is violated.
    fn validate(&self) -> PyResult<()> {
        checked(self).map(|_| ())
    }

    fn __repr__(&self) -> String {
        format!(
            "Params(b0={}, b={}, b1={}, epsilon={}, tau={}, rho={})",
            self.b0, self.b, self.b1, self.epsilon, self.tau, self.rho
        )
    }
}

/// Upper bound on epsilon below which the tangency parabolas stay disjoint.
#[pyfunction]
fn epsilon_bound(params: &Params) -> PyResult<f64> {
    Ok(model::epsilon_bound(&checked(params)?))
}

/// Snow line at which the tangency parabolas intersect for the configured
/// epsilon (negative exactly when epsilon is admissible).
#[pyfunction]
fn tangency_intersection_eta(params: &Params) -> PyResult<f64> {
    Ok(model::tangency_intersection_eta(&checked(params)?))
}

/// The w-nullcline F(eta).
#[pyfunction]
fn w_nullcline(eta: f64, params: &Params) -> PyResult<f64> {
    Ok(model::w_nullcline(eta, &checked(params)?))
}

/// The eta-nullcline G(eta) of the named regime ("advance" | "retreat").
#[pyfunction]
fn eta_nullcline(eta: f64, regime: &str, params: &Params) -> PyResult<f64> {
    Ok(model::eta_nullcline(
        eta,
        parse_regime(regime)?,
        &checked(params)?,
    ))
}

/// Tangency parabola g(eta) of the named regime on the switching plane.
#[pyfunction]
fn tangency_curve(eta: f64, regime: &str, params: &Params) -> PyResult<f64> {
    Ok(model::tangency_curve(
        eta,
        parse_regime(regime)?,
        &checked(params)?,
    ))
}

/// Ice-line coordinate of the switching plane at the given snow line.
#[pyfunction]
fn switching_ice_line(eta: f64, params: &Params) -> PyResult<f64> {
    Ok(model::switching_ice_line(eta, &checked(params)?))
}

/// Signed offset from the switching plane at (w, eta, xi).
#[pyfunction]
fn switching_function(w: f64, eta: f64, xi: f64, params: &Params) -> PyResult<f64> {
    Ok(model::switching_function(
        &State::new(w, eta, xi),
        &checked(params)?,
    ))
}

/// Normalized insolation weight at sine-latitude y.
#[pyfunction]
fn insolation(y: f64, params: &Params) -> PyResult<f64> {
    model::insolation_distribution(y, &checked(params)?)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

fn equilibrium_dict<'py>(
    py: Python<'py>,
    report: &model::EquilibriumReport,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("regime", report.regime.label())?;
    d.set_item("w", report.state.w)?;
    d.set_item("eta", report.state.eta)?;
    d.set_item("xi", report.state.xi)?;
    d.set_item("stability", format!("{:?}", report.stability).to_lowercase())?;
    d.set_item(
        "classification",
        format!("{:?}", report.classification).to_lowercase(),
    )?;
    let eigs: Vec<(f64, f64)> = report.eigenvalues.iter().map(|l| (l.re, l.im)).collect();
    d.set_item("eigenvalues", eigs)?;
    Ok(d)
}

/// All equilibria of both regimes, each as a dict with position,
/// eigenvalues, stability, and regular/virtual/boundary classification.
#[pyfunction]
fn equilibria<'py>(py: Python<'py>, params: &Params) -> PyResult<Bound<'py, PyList>> {
    let p = checked(params)?;
    let out = PyList::empty(py);
    for regime in [Regime::Retreat, Regime::Advance] {
        let reports =
            model::find_equilibria(regime, &p).map_err(|e| PyValueError::new_err(e.to_string()))?;
        for r in &reports {
            out.append(equilibrium_dict(py, r)?)?;
        }
    }
    Ok(out)
}

fn integrator_config(
    max_time: f64,
    sample_interval: f64,
    fixed_step: Option<f64>,
) -> IntegratorConfig {
    let mut cfg = IntegratorConfig {
        max_time,
        sample_interval,
        ..IntegratorConfig::default()
    };
    if let Some(dt) = fixed_step {
        cfg.step_mode = StepMode::FixedClassicalRk4;
        cfg.base_step = dt;
    }
    cfg
}

/// Integrate one hybrid trajectory. Returns a dict with sample arrays
/// (`t`, `w`, `eta`, `xi`, `regime`), the event log, and the termination
/// reason. Starts from the retreat-sink projection unless a start is given.
#[pyfunction]
#[pyo3(signature = (params, start=None, regime="auto", max_time=1e4, sample_interval=0.0, fixed_step=None))]
fn simulate<'py>(
    py: Python<'py>,
    params: &Params,
    start: Option<(f64, f64, f64)>,
    regime: &str,
    max_time: f64,
    sample_interval: f64,
    fixed_step: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let p = checked(params)?;
    let cfg = integrator_config(max_time, sample_interval, fixed_step);
    let state = match start {
        Some((w, eta, xi)) => State::new(w, eta, xi),
        None => retreat_sink_projection(&p)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?
            .state(&p),
    };
    let start_regime = match regime {
        "auto" => {
            let h = model::switching_function(&state, &p);
            if h.abs() <= cfg.event_tol {
                match model::classify_boundary_point(&state, &p, cfg.event_tol)
                    .map_err(|e| PyValueError::new_err(e.to_string()))?
                {
                    model::BoundaryClass::SigmaPlus => Regime::Advance,
                    model::BoundaryClass::SigmaMinus => Regime::Retreat,
                    other => {
                        return Err(PyValueError::new_err(format!(
                            "start lies on the plane at a {other:?} point; pass regime explicitly"
                        )))
                    }
                }
            } else if h < 0.0 {
                Regime::Advance
            } else {
                Regime::Retreat
            }
        }
        other => parse_regime(other)?,
    };
    let traj = evolve_hybrid(&state, start_regime, &p, &cfg)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;

    let n = traj.sample_count();
    let mut t = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let mut eta = Vec::with_capacity(n);
    let mut xi = Vec::with_capacity(n);
    let mut regimes: Vec<&'static str> = Vec::with_capacity(n);
    for seg in &traj.segments {
        for s in &seg.samples {
            t.push(s.t);
            w.push(s.state.w);
            eta.push(s.state.eta);
            xi.push(s.state.xi);
            regimes.push(seg.regime.label());
        }
    }
    let events = PyList::empty(py);
    for ev in &traj.events {
        let d = PyDict::new(py);
        d.set_item("t", ev.time)?;
        d.set_item("w", ev.state.w)?;
        d.set_item("eta", ev.state.eta)?;
        d.set_item("xi", ev.state.xi)?;
        d.set_item("kind", ev.kind.label())?;
        d.set_item("regime_before", ev.regime_before.label())?;
        d.set_item("regime_after", ev.regime_after.label())?;
        events.append(d)?;
    }

    let out = PyDict::new(py);
    out.set_item("t", t)?;
    out.set_item("w", w)?;
    out.set_item("eta", eta)?;
    out.set_item("xi", xi)?;
    out.set_item("regime", regimes)?;
    out.set_item("events", events)?;
    out.set_item("termination", traj.termination.label())?;
    Ok(out)
}

/// Locate the attracting periodic orbit. Returns a dict with the section
/// fixed point, its partner, period, closure error, and the contraction
/// estimate. Seeds at the retreat-sink projection unless one is given.
#[pyfunction]
#[pyo3(signature = (params, seed=None, tolerance=1e-10, max_iterations=500))]
fn find_orbit<'py>(
    py: Python<'py>,
    params: &Params,
    seed: Option<(f64, f64)>,
    tolerance: f64,
    max_iterations: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let p = checked(params)?;
    let ctx = SectionContext::new(p, IntegratorConfig::default())
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let seed_point = match seed {
        Some((w, eta)) => SectionPoint::new(w, eta),
        None => retreat_sink_projection(&p).map_err(|e| PyRuntimeError::new_err(e.to_string()))?,
    };
    let orbit = ctx
        .find_orbit(
            &seed_point,
            OrbitOptions {
                tolerance,
                max_iterations,
            },
        )
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let d = PyDict::new(py);
    d.set_item("w", orbit.fixed_point.w)?;
    d.set_item("eta", orbit.fixed_point.eta)?;
    d.set_item("partner_w", orbit.partner_point.w)?;
    d.set_item("partner_eta", orbit.partner_point.eta)?;
    d.set_item("period", orbit.period)?;
    d.set_item("closure_error", orbit.closure_error)?;
    d.set_item("contraction_estimate", orbit.contraction_estimate)?;
    d.set_item("iterations", orbit.iterations)?;
    Ok(d)
}

#[pymodule]
fn glacial_cycles_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Params>()?;
    m.add_function(wrap_pyfunction!(epsilon_bound, m)?)?;
    m.add_function(wrap_pyfunction!(tangency_intersection_eta, m)?)?;
    m.add_function(wrap_pyfunction!(w_nullcline, m)?)?;
    m.add_function(wrap_pyfunction!(eta_nullcline, m)?)?;
    m.add_function(wrap_pyfunction!(tangency_curve, m)?)?;
    m.add_function(wrap_pyfunction!(switching_ice_line, m)?)?;
    m.add_function(wrap_pyfunction!(switching_function, m)?)?;
    m.add_function(wrap_pyfunction!(insolation, m)?)?;
    m.add_function(wrap_pyfunction!(equilibria, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(find_orbit, m)?)?;
    Ok(())
}
