//! Per-record diagnostics of a running simulation.

mod blowup;
mod conditions;
mod kernel;

pub use blowup::{
    bkm_accumulate, blowup_horizon, c0_from_data, compute_h1, compute_h2, estimate_blowup_time, h2_of,
    lower_bound_curve, H2_ORIGIN_RTOL,
};
pub use conditions::{
    audit_d_positivity, check_convexity, check_d_positivity, check_q_monotonicity, check_uz_characteristics_bound,
    convexity_extent, q_profile,
};
pub use kernel::{check_kernel_inequalities, kernel_k, KernelReport, KERNEL_TOL};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Observer;
use crate::models::{symmetry_error, ModelState};
use crate::norms::vk_norm;
use crate::spectral::{derivative, hilbert_transform, velocity_from_vorticity};

/// One row of the time series. Quantities that are undefined for the
/// current state (for instance `h2` on a node grid) are stored as NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub h1: f64,
    pub h2: f64,
    /// `int_0^t h2 ds`
    pub h_cum: f64,
    /// `int_0^t ||H omega||_inf ds`
    pub bkm_integral: f64,
    pub m0: f64,
    pub lower_bound: f64,
    pub max_abs_omega: f64,
    pub min_vzz_halfdomain: f64,
    pub min_d: f64,
    pub min_qz: f64,
    pub uz_bound_ratio: f64,
    /// `(||u||_{V^{k+1}}, ||omega||_{V^k})` for `k = 0..=k_max`.
    pub vk_norms: Vec<(f64, f64)>,

    pub h_omega_inf: f64,
    pub max_abs_vzz: f64,
    /// `max|omega| max|u_z|`, the natural size of `D`.
    pub d_scale: f64,
    pub q_range: f64,
    pub max_abs_u: f64,
    pub uz_inf: f64,
    pub mean_omega: f64,
    pub u_even_err: f64,
    pub omega_odd_err: f64,
}

impl Default for DiagnosticsRecord {
    fn default() -> Self {
        Self {
            time: 0.0,
            h1: 0.0,
            h2: 0.0,
            h_cum: 0.0,
            bkm_integral: 0.0,
            m0: 1.0,
            lower_bound: 0.0,
            max_abs_omega: 0.0,
            min_vzz_halfdomain: 0.0,
            min_d: 0.0,
            min_qz: f64::NAN,
            uz_bound_ratio: 0.0,
            vk_norms: Vec::new(),
            h_omega_inf: 0.0,
            max_abs_vzz: 0.0,
            d_scale: 0.0,
            q_range: f64::NAN,
            max_abs_u: 0.0,
            uz_inf: 0.0,
            mean_omega: 0.0,
            u_even_err: 0.0,
            omega_odd_err: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticOptions {
    /// Side of the `D` sample; grids with fewer than `2 coarse_m` points use all half-domain points.
    pub coarse_m: usize,
    pub uz_floor: f64,
    pub k_max: u32,
}

impl Default for DiagnosticOptions {
    fn default() -> Self {
        Self { coarse_m: 64, uz_floor: 1e-3, k_max: 2 }
    }
}

impl DiagnosticOptions {
    pub fn validate(&self, n_points: usize) -> Result<()> {
        if self.coarse_m == 0 {
            return Err(Error::InvalidArgument { name: "coarse_m", reason: "must be >= 1".into() });
        }
        if !(self.uz_floor > 0.0 && self.uz_floor < 1.0) {
            return Err(Error::InvalidArgument { name: "uz_floor", reason: "must lie in (0, 1)".into() });
        }
        if self.k_max as usize + 1 > n_points / 4 {
            return Err(Error::InvalidArgument { name: "k_max", reason: "k_max + 1 exceeds N/4".into() });
        }
        Ok(())
    }
}

/// Accumulates the time integrals step by step and assembles records.
#[derive(Debug, Clone)]
pub struct DiagnosticsTracker {
    options: DiagnosticOptions,
    c0: f64,
    u0z_inf: f64,
    h2_defined: bool,
    time: f64,
    h2: f64,
    h_cum: f64,
    h_omega_inf: f64,
    bkm_integral: f64,
}

impl DiagnosticsTracker {
    pub fn new(initial: &ModelState, options: DiagnosticOptions) -> Result<Self> {
        options.validate(initial.grid().n_points())?;
        let (h2, h2_defined) = match compute_h2(initial) {
            Ok(h2) => (h2, true),
            Err(Error::IllDefinedH2(_)) => (f64::NAN, false),
            Err(e) => return Err(e),
        };
        let c0 = if h2_defined && h2 >= 0.0 { h2.sqrt() } else { f64::NAN };
        Ok(Self {
            options,
            c0,
            u0z_inf: derivative(&initial.u, 1)?.max_abs(),
            h2_defined,
            time: initial.time,
            h2,
            h_cum: 0.0,
            h_omega_inf: hilbert_transform(&initial.omega)?.max_abs(),
            bkm_integral: 0.0,
        })
    }

    /// `sqrt(h2(0))`, NaN when `h2` is undefined for the initial data.
    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn u0z_inf(&self) -> f64 {
        self.u0z_inf
    }

    pub fn options(&self) -> &DiagnosticOptions {
        &self.options
    }

    /// Integrals so far, as a record carrying only the accumulated fields.
    fn running(&self) -> DiagnosticsRecord {
        DiagnosticsRecord {
            time: self.time,
            h2: self.h2,
            h_cum: self.h_cum,
            bkm_integral: self.bkm_integral,
            m0: self.bkm_integral.exp(),
            h_omega_inf: self.h_omega_inf,
            ..Default::default()
        }
    }

    /// Diagnostics of `state` that depend on the state alone, merged with the
    /// accumulated integrals.
    pub fn snapshot(&self, state: &ModelState) -> Result<DiagnosticsRecord> {
        let mut rec = self.running();
        rec.time = state.time;
        rec.h1 = compute_h1(state)?;
        rec.lower_bound = if self.c0.is_nan() { f64::NAN } else { lower_bound_curve(self.c0, state.time) };
        rec.max_abs_omega = state.omega.max_abs();
        let (min_vzz, max_vzz) = convexity_extent(state)?;
        rec.min_vzz_halfdomain = min_vzz;
        rec.max_abs_vzz = max_vzz;
        rec.min_d = check_d_positivity(state, self.options.coarse_m.min(state.grid().n_points() / 2))?;
        rec.uz_inf = derivative(&state.u, 1)?.max_abs();
        rec.d_scale = rec.max_abs_omega * rec.uz_inf;
        (rec.min_qz, rec.q_range) = match q_profile(state, self.options.uz_floor) {
            Ok(q) => q,
            Err(Error::InsufficientSupport(_)) => (f64::NAN, f64::NAN),
            Err(e) => return Err(e),
        };
        rec.uz_bound_ratio = check_uz_characteristics_bound(&rec, self.u0z_inf, rec.uz_inf);
        rec.vk_norms = (0..=self.options.k_max)
            .map(|k| Ok((vk_norm(&state.u, k + 1)?, vk_norm(&state.omega, k)?)))
            .collect::<Result<_>>()?;
        rec.max_abs_u = state.literal_u().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        rec.mean_omega = state.omega.mean();
        (rec.u_even_err, rec.omega_odd_err) = symmetry_error(state);
        Ok(rec)
    }
}

impl Observer for DiagnosticsTracker {
    type Record = DiagnosticsRecord;

    fn on_step(&mut self, state: &ModelState, dt: f64) -> Result<()> {
        let (integral, _) = bkm_accumulate(&self.running(), state, dt)?;
        self.bkm_integral = integral;
        self.h_omega_inf = hilbert_transform(&state.omega)?.max_abs();
        if self.h2_defined {
            match compute_h2(state) {
                Ok(h2) => {
                    self.h_cum += blowup::trapezoid(self.h2, h2, dt);
                    self.h2 = h2;
                }
                // u(0) drifted off zero; h2 stays undefined for the rest of the run
                Err(Error::IllDefinedH2(_)) => {
                    self.h2_defined = false;
                    self.h2 = f64::NAN;
                    self.h_cum = f64::NAN;
                }
                Err(e) => return Err(e),
            }
        }
        self.time = state.time;
        Ok(())
    }

    fn record(&mut self, state: &ModelState) -> Result<DiagnosticsRecord> {
        self.snapshot(state)
    }
}

/// Grid values of `v`, the velocity column of snapshots.
pub fn velocity_of(state: &ModelState) -> Result<Vec<f64>> {
    Ok(velocity_from_vorticity(&state.omega)?.into_values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_initial_data, InitialData};
    use crate::spectral::{Field, Layout, PeriodicGrid};
    use std::f64::consts::PI;

    #[test]
    fn initial_record_of_blowup_data() {
        let g = PeriodicGrid::new(128, 2.0 * PI, Layout::Midpoint).unwrap();
        let s = make_initial_data(&InitialData::PaperBlowup { a: 1.0 }, g).unwrap();
        let mut tracker = DiagnosticsTracker::new(&s, DiagnosticOptions::default()).unwrap();
        assert!((tracker.c0() - 0.5).abs() < 1e-10);
        let rec = tracker.record(&s).unwrap();
        assert_eq!(rec.h1, 0.0);
        assert_eq!(rec.m0, 1.0);
        assert_eq!(rec.uz_bound_ratio, 1.0);
        assert_eq!(rec.lower_bound, 0.0);
        assert!((rec.h2 - 0.25).abs() < 1e-10);
        assert_eq!(rec.vk_norms.len(), 3);
        assert!(rec.u_even_err < 1e-15 && rec.omega_odd_err == 0.0);
    }

    #[test]
    fn node_grid_leaves_h2_undefined() {
        let g = PeriodicGrid::new(64, 2.0 * PI, Layout::Node).unwrap();
        let s = ModelState::new(Field::zeros(g), Field::from_fn(g, f64::sin), 0.0).unwrap();
        let mut tracker = DiagnosticsTracker::new(&s, DiagnosticOptions::default()).unwrap();
        tracker.on_step(&s, 0.1).unwrap();
        let rec = tracker.record(&s).unwrap();
        assert!(rec.h2.is_nan() && tracker.c0().is_nan());
        assert_eq!(rec.h_cum, 0.0);
        assert!((rec.bkm_integral - 0.1).abs() < 1e-14);
        assert_eq!(rec.m0, rec.bkm_integral.exp());
    }

    #[test]
    fn options_are_validated() {
        let g = PeriodicGrid::new(64, 2.0 * PI, Layout::Midpoint).unwrap();
        let s = ModelState::new(Field::zeros(g), Field::zeros(g), 0.0).unwrap();
        assert!(DiagnosticsTracker::new(&s, DiagnosticOptions::default()).is_ok());
        let bad = DiagnosticOptions { coarse_m: 0, ..Default::default() };
        assert!(DiagnosticsTracker::new(&s, bad).is_err());
        let bad = DiagnosticOptions { k_max: 16, ..Default::default() };
        assert!(DiagnosticsTracker::new(&s, bad).is_err());
    }
}
