//! Classical RK4 with CFL step selection and blowup-aware termination.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{rhs, ModelKind, ModelSpec, ModelState};
use crate::spectral::{hilbert_transform, tail_fraction_within, velocity_from_vorticity, Dealias, Field};

/// Below this mean the accumulated round-off in omega is left alone.
pub const MEAN_REPROJECT_TOL: f64 = 1e-13;

const EPS_V: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub cfl_number: f64,
    pub dt_max: f64,
    pub dt_min: f64,
    pub dealias: Dealias,
    pub tail_fraction_limit: f64,
    pub omega_max_limit: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            cfl_number: 0.4,
            dt_max: 1e-2,
            dt_min: 1e-10,
            dealias: Dealias::TwoThirds,
            tail_fraction_limit: 1e-6,
            omega_max_limit: 1e8,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: &str| {
            Err(Error::InvalidArgument { name, reason: reason.to_string() })
        };
        if !(self.cfl_number > 0.0 && self.cfl_number <= 1.0) {
            return bad("cfl_number", "must lie in (0, 1]");
        }
        if !(self.dt_min > 0.0 && self.dt_min < self.dt_max && self.dt_max.is_finite()) {
            return bad("dt_min", "need 0 < dt_min < dt_max");
        }
        if !(self.tail_fraction_limit > 0.0 && self.tail_fraction_limit < 1.0) {
            return bad("tail_fraction_limit", "must lie in (0, 1)");
        }
        if !(self.omega_max_limit > 0.0) {
            return bad("omega_max_limit", "must be positive");
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    TEnd,
    ResolutionLost,
    AmplitudeLimit,
    DtFloor,
    Overflow,
}

impl TerminationReason {
    /// Expected physical outcomes, as opposed to numerical failures.
    pub fn is_success(self) -> bool {
        matches!(self, Self::TEnd | Self::ResolutionLost | Self::AmplitudeLimit)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::TEnd => "t_end",
            Self::ResolutionLost => "resolution_lost",
            Self::AmplitudeLimit => "amplitude_limit",
            Self::DtFloor => "dt_floor",
            Self::Overflow => "overflow",
        }
    }
}

impl fmt::Display for TerminationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn check_finite(f: &Field, stage: usize, time: f64) -> Result<()> {
    if f.is_finite() {
        Ok(())
    } else {
        Err(Error::NumericalOverflow { stage, time })
    }
}

/// One classical four-stage Runge-Kutta step.
pub fn rk4_step(state: &ModelState, spec: &ModelSpec, dt: f64, rule: Dealias) -> Result<ModelState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument { name: "dt", reason: format!("{dt} must be > 0") });
    }
    let t = state.time;
    let stage_state = |du: &Field, dw: &Field, h: f64, stage: usize| -> Result<ModelState> {
        let u = state.u.axpy(h, du)?;
        let w = state.omega.axpy(h, dw)?;
        check_finite(&u, stage, t)?;
        check_finite(&w, stage, t)?;
        ModelState::with_offset(u, w, t + h, state.u_offset)
    };

    let (k1u, k1w) = rhs(state, spec, rule)?;
    check_finite(&k1w, 1, t)?;
    let (k2u, k2w) = rhs(&stage_state(&k1u, &k1w, 0.5 * dt, 2)?, spec, rule)?;
    let (k3u, k3w) = rhs(&stage_state(&k2u, &k2w, 0.5 * dt, 3)?, spec, rule)?;
    let (k4u, k4w) = rhs(&stage_state(&k3u, &k3w, dt, 4)?, spec, rule)?;

    let combine = |y: &Field, k1: &Field, k2: &Field, k3: &Field, k4: &Field| -> Vec<f64> {
        let h6 = dt / 6.0;
        y.values()
            .iter()
            .zip(k1.values())
            .zip(k2.values())
            .zip(k3.values().iter().zip(k4.values()))
            .map(|(((y, a), b), (c, d))| y + h6 * (a + 2.0 * b + 2.0 * c + d))
            .collect()
    };
    let grid = *state.grid();
    let u = Field::new(grid, combine(&state.u, &k1u, &k2u, &k3u, &k4u))?;
    let mut w_values = combine(&state.omega, &k1w, &k2w, &k3w, &k4w);
    let w = Field::new(grid, w_values.clone())?;
    check_finite(&u, 5, t)?;
    check_finite(&w, 5, t)?;

    let drift = w.mean();
    if drift.abs() > w.zero_mean_tolerance() {
        return Err(Error::MeanDrift { drift });
    }
    let omega = if drift.abs() > MEAN_REPROJECT_TOL {
        w_values.iter_mut().for_each(|v| *v -= drift);
        Field::new(grid, w_values)?
    } else {
        w
    };
    ModelState::with_offset(u, omega, t + dt, state.u_offset)
}

/// Largest advection speed of the model; zero for CLM, which has no transport term.
pub fn advection_speed(state: &ModelState, spec: &ModelSpec) -> Result<f64> {
    Ok(match spec.kind {
        ModelKind::BoundarySystem => velocity_from_vorticity(&state.omega)?.max_abs(),
        ModelKind::Ccf => hilbert_transform(&state.omega)?.max_abs(),
        _ => {
            let a = spec.convection().unwrap_or(0.0);
            if a == 0.0 {
                0.0
            } else {
                a.abs() * velocity_from_vorticity(&state.omega)?.max_abs()
            }
        }
    })
}

/// CFL step `min(dt_max, cfl dz / max|v|)`. May return less than `dt_min`;
/// the run loop treats that as termination.
pub fn choose_dt(state: &ModelState, spec: &ModelSpec, control: &StepControl) -> Result<f64> {
    let speed = advection_speed(state, spec)?.max(EPS_V);
    Ok(control.dt_max.min(control.cfl_number * state.grid().spacing() / speed))
}

/// Per-step hook and record factory used by [`run`].
pub trait Observer {
    type Record;

    /// Called after every accepted step with the step size that produced `state`.
    fn on_step(&mut self, _state: &ModelState, _dt: f64) -> Result<()> {
        Ok(())
    }

    fn record(&mut self, state: &ModelState) -> Result<Self::Record>;
}

/// Records only the time of each sample.
pub struct TimesOnly;

impl Observer for TimesOnly {
    type Record = f64;

    fn record(&mut self, state: &ModelState) -> Result<f64> {
        Ok(state.time)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput<R> {
    pub final_state: ModelState,
    pub termination: TerminationReason,
    pub records: Vec<R>,
    pub steps: usize,
}

/// How often the observer is asked for a record.
#[derive(Debug, Clone, Copy)]
pub struct RunSettings {
    pub t_end: f64,
    pub record_every: usize,
}

/// Resolution monitor: tail energy of `omega` (and of `u` for the wall
/// system) within the band the dealiasing rule keeps alive.
pub fn resolution_tail(state: &ModelState, spec: &ModelSpec, rule: Dealias) -> f64 {
    let k_max = rule.cutoff(state.grid().n_points());
    let tail_w = tail_fraction_within(&state.omega, k_max);
    if spec.is_scalar() {
        tail_w
    } else {
        tail_w.max(tail_fraction_within(&state.u, k_max))
    }
}

pub fn run<O: Observer>(
    initial: &ModelState,
    spec: &ModelSpec,
    control: &StepControl,
    settings: RunSettings,
    observer: &mut O,
) -> Result<RunOutput<O::Record>> {
    control.validate()?;
    let record_every = settings.record_every.max(1);
    let t_end = settings.t_end;
    let mut state = initial.clone();
    let mut records = Vec::new();
    let mut steps = 0;
    if t_end <= state.time {
        return Ok(RunOutput { final_state: state, termination: TerminationReason::TEnd, records, steps });
    }
    records.push(observer.record(&state)?);
    let mut last_recorded = state.time;
    // Step sizes smaller than this relative to t_end are treated as arrival.
    let arrival = 1e-12 * t_end.abs().max(1.0);

    let termination = loop {
        if t_end - state.time <= arrival {
            break TerminationReason::TEnd;
        }
        if resolution_tail(&state, spec, control.dealias) > control.tail_fraction_limit {
            break TerminationReason::ResolutionLost;
        }
        if state.omega.max_abs() > control.omega_max_limit {
            break TerminationReason::AmplitudeLimit;
        }
        let dt = choose_dt(&state, spec, control)?;
        if dt < control.dt_min {
            break TerminationReason::DtFloor;
        }
        let dt = dt.min(t_end - state.time);
        let next = match rk4_step(&state, spec, dt, control.dealias) {
            Ok(next) => next,
            Err(Error::NumericalOverflow { .. }) => break TerminationReason::Overflow,
            Err(e) => return Err(e),
        };
        state = next;
        steps += 1;
        observer.on_step(&state, dt)?;
        if steps % record_every == 0 {
            records.push(observer.record(&state)?);
            last_recorded = state.time;
        }
    };

    if termination == TerminationReason::TEnd && state.time > last_recorded {
        records.push(observer.record(&state)?);
    }
    Ok(RunOutput { final_state: state, termination, records, steps })
}
