use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticOptions;
use crate::error::{Error, Result};
use crate::integrator::StepControl;
use crate::models::{make_initial_data, InitialData, ModelKind, ModelSpec, ModelState};
use crate::spectral::{Dealias, Layout, PeriodicGrid};

/// Full description of one simulation. Every optional key has a default that
/// is written back out in the config echo of `run.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub model: ModelKind,
    /// Required for `osw`, rejected otherwise.
    #[serde(default)]
    pub osw_a: Option<f64>,
    #[serde(default = "yes")]
    pub stretching: bool,
    pub grid_n: usize,
    pub domain_length: f64,
    #[serde(default = "default_layout")]
    pub layout: Layout,
    pub initial: InitialData,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
    #[serde(default = "default_dt_min")]
    pub dt_min: f64,
    #[serde(default = "yes")]
    pub dealias: bool,
    #[serde(default = "default_tail")]
    pub tail_fraction_limit: f64,
    #[serde(default = "default_omega_max")]
    pub omega_max_limit: f64,
    pub t_end: f64,
    /// Steps between diagnostics records.
    #[serde(default = "default_cadence")]
    pub diag_cadence: usize,
    #[serde(default = "default_snapshots")]
    pub snapshot_count: usize,
    #[serde(default)]
    pub diag_options: DiagnosticOptions,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Seeds the perturbation profile of perturbation studies.
    #[serde(default)]
    pub seed: u64,
}

fn yes() -> bool {
    true
}
fn default_layout() -> Layout {
    Layout::Midpoint
}
fn default_cfl() -> f64 {
    StepControl::default().cfl_number
}
fn default_dt_max() -> f64 {
    StepControl::default().dt_max
}
fn default_dt_min() -> f64 {
    StepControl::default().dt_min
}
fn default_tail() -> f64 {
    StepControl::default().tail_fraction_limit
}
fn default_omega_max() -> f64 {
    StepControl::default().omega_max_limit
}
fn default_cadence() -> usize {
    10
}
fn default_snapshots() -> usize {
    20
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("output")
}

fn config_error(key: &str, reason: impl Into<String>) -> Error {
    Error::Config { key: key.to_string(), reason: reason.into() }
}

/// Picks the offending key out of a serde error. Missing keys are reported
/// against the enclosing object.
fn key_of(path: &str, message: &str) -> String {
    for marker in ["unknown field `", "missing field `"] {
        if let Some(rest) = message.split(marker).nth(1) {
            let name = rest.split('`').next().unwrap_or_default();
            return if path == "." {
                name.to_string()
            } else if path == name || path.ends_with(&format!(".{name}")) {
                path.to_string()
            } else {
                format!("{path}.{name}")
            };
        }
    }
    path.to_string()
}

pub fn parse_config(text: &str) -> Result<SimConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: SimConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let message = e.inner().to_string();
        config_error(&key_of(&path, &message), message)
    })?;
    config.validate()?;
    Ok(config)
}

fn require(ok: bool, key: &str, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(config_error(key, reason))
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        match (self.model, self.osw_a) {
            (ModelKind::Osw, None) => return Err(config_error("osw_a", "required for model osw")),
            (ModelKind::Osw, Some(a)) => require(a.is_finite(), "osw_a", "must be finite")?,
            (_, Some(_)) => return Err(config_error("osw_a", "only valid for model osw")),
            _ => {}
        }
        require(
            self.grid_n >= 8 && self.grid_n.is_power_of_two(),
            "grid_n",
            "must be a power of two >= 8",
        )?;
        require(self.domain_length.is_finite() && self.domain_length > 0.0, "domain_length", "must be > 0")?;
        require(self.t_end.is_finite() && self.t_end > 0.0, "t_end", "must be > 0")?;
        require(self.cfl > 0.0 && self.cfl <= 1.0, "cfl", "must lie in (0, 1]")?;
        require(self.dt_max.is_finite() && self.dt_max > 0.0, "dt_max", "must be > 0")?;
        require(self.dt_min > 0.0 && self.dt_min < self.dt_max, "dt_min", "need 0 < dt_min < dt_max")?;
        require(
            self.tail_fraction_limit > 0.0 && self.tail_fraction_limit < 1.0,
            "tail_fraction_limit",
            "must lie in (0, 1)",
        )?;
        require(self.omega_max_limit > 0.0, "omega_max_limit", "must be > 0")?;
        require(self.diag_cadence >= 1, "diag_cadence", "must be >= 1")?;
        self.diag_options.validate(self.grid_n).map_err(|e| match e {
            Error::InvalidArgument { name, reason } => config_error(&format!("diag_options.{name}"), reason),
            other => other,
        })?;
        self.initial_state().map(|_| ())
    }

    pub fn grid(&self) -> Result<PeriodicGrid> {
        PeriodicGrid::new(self.grid_n, self.domain_length, self.layout)
    }

    pub fn model_spec(&self) -> ModelSpec {
        ModelSpec { kind: self.model, osw_a: self.osw_a.unwrap_or(0.0), stretching: self.stretching }
    }

    pub fn step_control(&self) -> StepControl {
        StepControl {
            cfl_number: self.cfl,
            dt_max: self.dt_max,
            dt_min: self.dt_min,
            dealias: if self.dealias { Dealias::TwoThirds } else { Dealias::None },
            tail_fraction_limit: self.tail_fraction_limit,
            omega_max_limit: self.omega_max_limit,
        }
    }

    pub fn initial_state(&self) -> Result<ModelState> {
        let state = make_initial_data(&self.initial, self.grid()?).map_err(|e| match e {
            Error::InvalidArgument { name, reason } => config_error(&format!("initial.{name}"), reason),
            other => other,
        })?;
        if self.model_spec().is_scalar() && state.u.max_abs() > 0.0 {
            return Err(config_error("initial", "scalar models carry no u component"));
        }
        Ok(state)
    }

    /// Same run on a grid `factor` times finer.
    pub fn refined(&self, factor: usize) -> Self {
        Self { grid_n: self.grid_n * factor, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"model": "boundary_system", "grid_n": 256, "domain_length": 6.283185307179586,
        "initial": {"kind": "paper_blowup", "a": 1.0}, "t_end": 1.0}"#;

    fn key_of_error(text: &str) -> String {
        match parse_config(text) {
            Err(Error::Config { key, .. }) => key,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.diag_cadence, 10);
        assert_eq!(c.snapshot_count, 20);
        assert_eq!(c.layout, Layout::Midpoint);
        assert_eq!(c.step_control(), StepControl::default());
        assert_eq!(c.diag_options, DiagnosticOptions::default());
    }

    #[test]
    fn echo_round_trips() {
        let c = parse_config(MINIMAL).unwrap();
        let echo = serde_json::to_string(&c).unwrap();
        assert_eq!(parse_config(&echo).unwrap(), c);
    }

    #[test]
    fn errors_name_the_key() {
        assert_eq!(key_of_error(&MINIMAL.replace("256", "100")), "grid_n");
        assert_eq!(key_of_error(&MINIMAL.replace("boundary_system", "osw")), "osw_a");
        assert_eq!(key_of_error(&MINIMAL.replace("\"t_end\"", "\"bogus\": 1, \"t_end\"")), "bogus");
        assert_eq!(key_of_error(&MINIMAL.replace("\"t_end\": 1.0", "\"t_end\": \"soon\"")), "t_end");
        assert_eq!(key_of_error(&MINIMAL.replace(", \"t_end\": 1.0", "")), "t_end");
        assert_eq!(key_of_error(&MINIMAL.replace("\"a\": 1.0", "\"a\": -1.0")), "initial.a");
        assert_eq!(
            key_of_error(&MINIMAL.replace("\"t_end\"", "\"diag_options\": {\"coarse_m\": 0}, \"t_end\"")),
            "diag_options.coarse_m"
        );
        assert_eq!(
            key_of_error(&MINIMAL.replace("\"t_end\"", "\"diag_options\": {\"m\": 3}, \"t_end\"")),
            "diag_options.m"
        );
    }

    #[test]
    fn osw_needs_its_coefficient() {
        let text = r#"{"model": "osw", "osw_a": 0.5, "grid_n": 64, "domain_length": 6.283185307179586,
            "initial": {"kind": "custom_modes", "modes": [{"field": "omega", "k": 1, "sin": 1.0}]}, "t_end": 0.1}"#;
        let c = parse_config(text).unwrap();
        assert_eq!(c.model_spec().osw_a, 0.5);
        assert_eq!(key_of_error(&text.replace("\"osw\"", "\"clm\"")), "osw_a");
    }
}
