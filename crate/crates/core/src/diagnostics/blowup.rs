//! The blowup functionals `h1`, `h2`, their lower-bound curve, the BKM
//! accumulator and the empirical singularity-time fit.

use std::f64::consts::FRAC_PI_2;

use super::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::models::ModelState;
use crate::spectral::{eval_at_point, hilbert_transform, Field, Layout};

/// `h1 = -v_z(0) = -H omega(0)`, by Fourier summation at the origin.
pub fn compute_h1(state: &ModelState) -> Result<f64> {
    let h = hilbert_transform(&state.omega)?;
    Ok(-eval_at_point(&h, 0.0))
}

/// Relative size of the untranslated `u(0)` above which `h2` is rejected.
pub const H2_ORIGIN_RTOL: f64 = 1e-8;

/// `h2 = (mu / L) int u cot^2(mu z) dz` for the untranslated profile `u + u_offset`.
///
/// The integrand is regularized as `(u - u(0)) cot^2(mu z)` and summed with
/// the midpoint rule, which requires a midpoint grid and `u + u_offset` to
/// vanish at the origin.
pub fn h2_of(u: &Field, u_offset: f64) -> Result<f64> {
    let grid = u.grid();
    if grid.layout() != Layout::Midpoint {
        return Err(Error::IllDefinedH2("requires a midpoint grid".into()));
    }
    let u0 = eval_at_point(u, 0.0);
    let literal_origin = u0 + u_offset;
    let scale = u.values().iter().fold(0.0f64, |m, v| m.max((v + u_offset).abs()));
    if literal_origin.abs() > H2_ORIGIN_RTOL * scale {
        return Err(Error::IllDefinedH2(format!("u(0) = {literal_origin:e} does not vanish")));
    }
    let mu = grid.mu();
    let sum: f64 = u
        .values()
        .iter()
        .zip(grid.points())
        .map(|(v, z)| {
            let c = (mu * z).tan().recip();
            (v - u0) * c * c
        })
        .sum();
    Ok(mu / grid.length() * sum * grid.spacing())
}

pub fn compute_h2(state: &ModelState) -> Result<f64> {
    h2_of(&state.u, state.u_offset)
}

/// `c0 = sqrt(h2(0))`.
pub fn c0_from_data(u0: &Field, u_offset: f64) -> Result<f64> {
    let h2 = h2_of(u0, u_offset)?;
    if h2 < 0.0 {
        return Err(Error::InconsistentData(format!("h2(0) = {h2:e} is negative")));
    }
    Ok(h2.sqrt())
}

/// `2 c0 tan(c0 t / 2)`; `+inf` from the horizon `t = pi / c0` on.
pub fn lower_bound_curve(c0: f64, t: f64) -> f64 {
    let arg = 0.5 * c0 * t;
    if arg >= FRAC_PI_2 {
        f64::INFINITY
    } else {
        2.0 * c0 * arg.tan()
    }
}

/// Horizon `pi / c0` of [`lower_bound_curve`].
pub fn blowup_horizon(c0: f64) -> f64 {
    std::f64::consts::PI / c0
}

pub(crate) fn trapezoid(prev: f64, next: f64, dt: f64) -> f64 {
    0.5 * dt * (prev + next)
}

/// Advances `int_0^t ||H omega||_inf ds` by one trapezoid panel from `prev`
/// to `state`; returns the integral and `M0 = exp(integral)`.
pub fn bkm_accumulate(prev: &DiagnosticsRecord, state: &ModelState, dt_elapsed: f64) -> Result<(f64, f64)> {
    let h_inf = hilbert_transform(&state.omega)?.max_abs();
    let integral = prev.bkm_integral + trapezoid(prev.h_omega_inf, h_inf, dt_elapsed);
    Ok((integral, integral.exp()))
}

/// Linear least-squares fit of `1 / max|omega|` against `t` over the last
/// quarter of the records. Returns the extrapolated zero crossing and the
/// coefficient of determination.
pub fn estimate_blowup_time(records: &[DiagnosticsRecord]) -> Result<(f64, f64)> {
    if records.len() < 8 {
        return Err(Error::FitUnavailable(format!("{} records, need at least 8", records.len())));
    }
    let window = &records[records.len() - records.len() / 4..];
    let increasing = window.windows(2).all(|w| w[1].max_abs_omega > w[0].max_abs_omega);
    if !increasing || window[0].max_abs_omega <= 0.0 {
        return Err(Error::FitUnavailable("max|omega| is not strictly increasing in the tail".into()));
    }
    let n = window.len() as f64;
    let ts: Vec<f64> = window.iter().map(|r| r.time).collect();
    let ys: Vec<f64> = window.iter().map(|r| r.max_abs_omega.recip()).collect();
    let t_mean = ts.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (t, y) in ts.iter().zip(&ys) {
        sxy += (t - t_mean) * (y - y_mean);
        sxx += (t - t_mean).powi(2);
        syy += (y - y_mean).powi(2);
    }
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return Err(Error::FitUnavailable("1/max|omega| is not decreasing".into()));
    }
    let intercept = y_mean - slope * t_mean;
    let ss_res: f64 = ts.iter().zip(&ys).map(|(t, y)| (y - intercept - slope * t).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok((-intercept / slope, r2))
}
