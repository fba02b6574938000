//! Run configuration: flat `key = value` files with dotted namespaces plus
//! command-line overrides. Unknown keys are hard errors so that sweep
//! scripts cannot silently misconfigure a run.

use std::path::{Path, PathBuf};

use crate::integrator::{IntegratorConfig, StepMode};
use crate::model::ModelParameters;
use crate::section::OrbitOptions;

use super::CliError;

/// Initial condition and regime selection for `simulate`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulateSettings {
    /// Explicit start point; when absent the run starts from the projection
    /// of the retreat sink onto the switching plane.
    pub start: Option<(f64, f64, f64)>,
    /// `None` selects the regime from the sign of the switching function.
    pub regime: Option<crate::model::Regime>,
}

/// Settings for the periodic-orbit search.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSettings {
    /// Seed on the switching plane; defaults to the retreat-sink projection.
    pub seed: Option<(f64, f64)>,
    pub options: OrbitOptions,
    /// Run even when ε is at or above the tangency-intersection bound.
    pub allow_inadmissible_epsilon: bool,
    /// Target sample count for the emitted one-period trajectory.
    pub trajectory_samples: usize,
}

/// Settings for the ablation-rate sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub b0_min: f64,
    pub b0_max: f64,
    pub b0_step: f64,
    /// Worker threads; 0 uses all available cores.
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullclineSettings {
    pub samples: usize,
}

/// Everything a command needs: model parameters, integrator settings,
/// per-command experiment settings, and the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParameters,
    pub integrator: IntegratorConfig,
    pub simulate: SimulateSettings,
    pub orbit: OrbitSettings,
    pub sweep: SweepSettings,
    pub nullclines: NullclineSettings,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ModelParameters::standard(),
            integrator: IntegratorConfig::default(),
            simulate: SimulateSettings {
                start: None,
                regime: None,
            },
            orbit: OrbitSettings {
                seed: None,
                options: OrbitOptions::default(),
                allow_inadmissible_epsilon: false,
                trajectory_samples: 2000,
            },
            sweep: SweepSettings {
                b0_min: 1.50,
                b0_max: 2.50,
                b0_step: 0.02,
                workers: 0,
            },
            nullclines: NullclineSettings { samples: 1001 },
            out_dir: PathBuf::from("out"),
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("key '{key}': cannot parse '{value}' as a number")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("key '{key}': cannot parse '{value}' as a count")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::Config(format!(
            "key '{key}': cannot parse '{value}' as a boolean"
        ))),
    }
}

/// When part of an explicit start point is configured, every component must
/// be; this holds the partially applied values until validation.
#[derive(Debug, Default, Clone)]
struct PartialStart {
    w0: Option<f64>,
    eta0: Option<f64>,
    xi0: Option<f64>,
}

/// Builder applying dotted keys onto a [`RunConfig`].
#[derive(Debug, Clone, Default)]
pub struct ConfigBuilder {
    config: RunConfig,
    start: PartialStart,
}

impl ConfigBuilder {
    /// Apply one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let c = &mut self.config;
        match key {
            "params.Q" => c.params.q = parse_f64(key, value)?,
            "params.A" => c.params.a_olr = parse_f64(key, value)?,
            "params.B" => c.params.b_olr = parse_f64(key, value)?,
            "params.C" => c.params.c_transport = parse_f64(key, value)?,
            "params.alpha1" => c.params.alpha1 = parse_f64(key, value)?,
            "params.alpha2" => c.params.alpha2 = parse_f64(key, value)?,
            "params.Tc_plus" => c.params.tc_plus = parse_f64(key, value)?,
            "params.Tc_minus" => c.params.tc_minus = parse_f64(key, value)?,
            "params.a" => c.params.accum = parse_f64(key, value)?,
            "params.b0" => c.params.b0 = parse_f64(key, value)?,
            "params.b" => c.params.b = parse_f64(key, value)?,
            "params.b1" => c.params.b1 = parse_f64(key, value)?,
            "params.tau" => c.params.tau = parse_f64(key, value)?,
            "params.rho" => c.params.rho = parse_f64(key, value)?,
            "params.epsilon" => c.params.epsilon = parse_f64(key, value)?,
            "params.s2" => c.params.s2 = parse_f64(key, value)?,

            "integrator.step_mode" => {
                c.integrator.step_mode = match value {
                    "fixed_classical_rk4" => StepMode::FixedClassicalRk4,
                    "embedded_adaptive" => StepMode::EmbeddedAdaptive,
                    _ => {
                        return Err(CliError::Config(format!(
                            "key '{key}': expected fixed_classical_rk4|embedded_adaptive, got '{value}'"
                        )))
                    }
                }
            }
            "integrator.base_step" => c.integrator.base_step = parse_f64(key, value)?,
            "integrator.rel_tol" => c.integrator.rel_tol = parse_f64(key, value)?,
            "integrator.abs_tol" => c.integrator.abs_tol = parse_f64(key, value)?,
            "integrator.event_tol" => c.integrator.event_tol = parse_f64(key, value)?,
            "integrator.max_time" => c.integrator.max_time = parse_f64(key, value)?,
            "integrator.max_events" => c.integrator.max_events = parse_usize(key, value)?,
            "integrator.sample_interval" => {
                c.integrator.sample_interval = parse_f64(key, value)?
            }

            "simulate.w0" => self.start.w0 = Some(parse_f64(key, value)?),
            "simulate.eta0" => self.start.eta0 = Some(parse_f64(key, value)?),
            "simulate.xi0" => self.start.xi0 = Some(parse_f64(key, value)?),
            "simulate.regime" => {
                c.simulate.regime = match value {
                    "auto" => None,
                    other => Some(other.parse().map_err(|e| {
                        CliError::Config(format!("key '{key}': {e}"))
                    })?),
                }
            }

            "orbit.seed_w" => {
                let eta = self.config.orbit.seed.map(|s| s.1).unwrap_or(f64::NAN);
                self.config.orbit.seed = Some((parse_f64(key, value)?, eta));
            }
            "orbit.seed_eta" => {
                let w = self.config.orbit.seed.map(|s| s.0).unwrap_or(f64::NAN);
                self.config.orbit.seed = Some((w, parse_f64(key, value)?));
            }
            "orbit.tolerance" => c.orbit.options.tolerance = parse_f64(key, value)?,
            "orbit.max_iterations" => c.orbit.options.max_iterations = parse_usize(key, value)?,
            "orbit.allow_inadmissible_epsilon" => {
                c.orbit.allow_inadmissible_epsilon = parse_bool(key, value)?
            }
            "orbit.trajectory_samples" => c.orbit.trajectory_samples = parse_usize(key, value)?,

            "sweep.b0_min" => c.sweep.b0_min = parse_f64(key, value)?,
            "sweep.b0_max" => c.sweep.b0_max = parse_f64(key, value)?,
            "sweep.b0_step" => c.sweep.b0_step = parse_f64(key, value)?,
            "sweep.workers" => c.sweep.workers = parse_usize(key, value)?,

            "nullclines.samples" => c.nullclines.samples = parse_usize(key, value)?,

            "output.dir" => c.out_dir = PathBuf::from(value),

            _ => return Err(CliError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Apply every assignment in a config file. Lines are `key = value`;
    /// blank lines and `#` comments are ignored.
    pub fn load_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "{}:{}: expected 'key = value', got '{raw}'",
                    path.display(),
                    idx + 1
                ))
            })?;
            self.set(key.trim(), value.trim()).map_err(|e| match e {
                CliError::Config(msg) => {
                    CliError::Config(format!("{}:{}: {msg}", path.display(), idx + 1))
                }
                other => other,
            })?;
        }
        Ok(())
    }

    /// Apply `key=value` override strings (from `--set`).
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<(), CliError> {
        for item in overrides {
            let (key, value) = item.split_once('=').ok_or_else(|| {
                CliError::Config(format!("override '{item}': expected key=value"))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Validate cross-field constraints and produce the final config.
    pub fn build(mut self) -> Result<RunConfig, CliError> {
        match (self.start.w0, self.start.eta0, self.start.xi0) {
            (None, None, None) => {}
            (Some(w), Some(eta), Some(xi)) => {
                self.config.simulate.start = Some((w, eta, xi));
            }
            _ => {
                return Err(CliError::Config(
                    "simulate.w0, simulate.eta0 and simulate.xi0 must be set together".into(),
                ))
            }
        }
        if let Some((w, eta)) = self.config.orbit.seed {
            if w.is_nan() || eta.is_nan() {
                return Err(CliError::Config(
                    "orbit.seed_w and orbit.seed_eta must be set together".into(),
                ));
            }
        }
        if !self.config.sweep.b0_min.is_finite()
            || !self.config.sweep.b0_max.is_finite()
            || !self.config.sweep.b0_step.is_finite()
        {
            return Err(CliError::Config("sweep range must be finite".into()));
        }
        if self.config.sweep.b0_step <= 0.0 {
            return Err(CliError::Config("sweep.b0_step must be positive".into()));
        }
        if self.config.sweep.b0_max < self.config.sweep.b0_min {
            return Err(CliError::Config(
                "sweep.b0_max must not be below sweep.b0_min".into(),
            ));
        }
        if self.config.nullclines.samples < 2 {
            return Err(CliError::Config("nullclines.samples must be at least 2".into()));
        }
        self.config
            .params
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        self.config
            .integrator
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(self.config)
    }
}

/// Assemble a config from an optional file, `--set` overrides, and an
/// optional output-directory override, in that order.
pub fn load_config(
    file: Option<&Path>,
    overrides: &[String],
    out_dir: Option<&Path>,
) -> Result<RunConfig, CliError> {
    let mut builder = ConfigBuilder::default();
    if let Some(path) = file {
        builder.load_file(path)?;
    }
    builder.apply_overrides(overrides)?;
    let mut config = builder.build()?;
    if let Some(dir) = out_dir {
        config.out_dir = dir.to_path_buf();
    }
    Ok(config)
}
