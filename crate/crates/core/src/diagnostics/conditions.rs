//! Sign conditions behind the blowup argument: positivity of
//! `D(y, z) = omega(z) u_y(y) - u_z(z) omega(y)`, convexity of `v` and
//! monotonicity of `Q = omega / u_z` on the half period.

use super::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::models::ModelState;
use crate::spectral::{derivative, velocity_from_vorticity};

/// Minimum of `D(y, z)` over an `m x m` triangular sample of
/// `0 < y <= z < L/2`, taken on evenly strided grid points.
pub fn check_d_positivity(state: &ModelState, coarse_m: usize) -> Result<f64> {
    let grid = state.grid();
    let half: Vec<usize> = grid.half_domain_indices().collect();
    if coarse_m == 0 || coarse_m > grid.n_points() / 2 {
        return Err(Error::InvalidArgument { name: "coarse_m", reason: format!("{coarse_m} not in 1..=N/2") });
    }
    let m = coarse_m.min(half.len());
    let sample: Vec<usize> = (0..m).map(|i| half[i * half.len() / m]).collect();
    let u_z = derivative(&state.u, 1)?;
    let (uz, w) = (u_z.values(), state.omega.values());
    let mut min_d = f64::INFINITY;
    for (a, &y) in sample.iter().enumerate() {
        for &z in &sample[a..] {
            min_d = min_d.min(w[z] * uz[y] - uz[z] * w[y]);
        }
    }
    Ok(min_d)
}

/// [`check_d_positivity`] over every pair of half-domain grid points.
pub fn audit_d_positivity(state: &ModelState) -> Result<f64> {
    check_d_positivity(state, state.grid().half_domain_indices().len())
}

/// `(min v_zz on (0, L/2), max |v_zz|)`.
pub fn convexity_extent(state: &ModelState) -> Result<(f64, f64)> {
    let v = velocity_from_vorticity(&state.omega)?;
    let v_zz = derivative(&v, 2)?;
    let min = state.grid().half_domain_indices().map(|j| v_zz.values()[j]).fold(f64::INFINITY, f64::min);
    Ok((min, v_zz.max_abs()))
}

pub fn check_convexity(state: &ModelState) -> Result<f64> {
    Ok(convexity_extent(state)?.0)
}

/// `(min forward difference of Q, max Q - min Q)` over admitted half-domain
/// points, i.e. those with `u_z > uz_floor max|u_z|`. Differences are taken
/// only between grid-adjacent admitted points.
pub fn q_profile(state: &ModelState, uz_floor: f64) -> Result<(f64, f64)> {
    if !(uz_floor > 0.0) {
        return Err(Error::InvalidArgument { name: "uz_floor", reason: "must be > 0".into() });
    }
    let u_z = derivative(&state.u, 1)?;
    let threshold = uz_floor * u_z.max_abs();
    let (uz, w) = (u_z.values(), state.omega.values());
    let admitted: Vec<(usize, f64)> = state
        .grid()
        .half_domain_indices()
        .filter(|&j| uz[j] > threshold)
        .map(|j| (j, w[j] / uz[j]))
        .collect();
    if admitted.len() < 2 {
        return Err(Error::InsufficientSupport(format!("{} admitted points", admitted.len())));
    }
    let mut min_dq = f64::INFINITY;
    for pair in admitted.windows(2) {
        if pair[1].0 == pair[0].0 + 1 {
            min_dq = min_dq.min(pair[1].1 - pair[0].1);
        }
    }
    if min_dq == f64::INFINITY {
        return Err(Error::InsufficientSupport("no adjacent admitted points".into()));
    }
    let (lo, hi) = admitted.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, q)| {
        (lo.min(q), hi.max(q))
    });
    Ok((min_dq, hi - lo))
}

pub fn check_q_monotonicity(state: &ModelState, uz_floor: f64) -> Result<f64> {
    Ok(q_profile(state, uz_floor)?.0)
}

/// `||u_z(t)||_inf / (M0(t) ||u_0z||_inf)`, zero when the initial gradient vanishes.
pub fn check_uz_characteristics_bound(record: &DiagnosticsRecord, u0z_inf: f64, uz_inf_now: f64) -> f64 {
    if u0z_inf == 0.0 {
        0.0
    } else {
        uz_inf_now / (record.m0 * u0z_inf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Field, Layout, PeriodicGrid};
    use std::f64::consts::PI;

    fn grid() -> PeriodicGrid {
        PeriodicGrid::new(128, 2.0 * PI, Layout::Midpoint).unwrap()
    }

    fn state(u: Field, w: Field) -> ModelState {
        ModelState::new(u, w, 0.0).unwrap()
    }

    #[test]
    fn d_vanishes_without_vorticity() {
        let g = grid();
        let s = state(Field::from_fn(g, |z| -z.cos()), Field::zeros(g));
        assert_eq!(check_d_positivity(&s, 64).unwrap(), 0.0);
        assert!(check_d_positivity(&s, 65).is_err());
        assert!(check_d_positivity(&s, 0).is_err());
    }

    #[test]
    fn d_cancels_when_omega_is_u_z() {
        let g = grid();
        let u = Field::from_fn(g, |z| -z.cos() - 0.3 * (2.0 * z).cos());
        let w = derivative(&u, 1).unwrap();
        let s = state(u, w);
        assert!(check_d_positivity(&s, 64).unwrap().abs() < 1e-12);
        assert!(audit_d_positivity(&s).unwrap().abs() < 1e-12);
    }

    #[test]
    fn convexity_examples() {
        let g = grid();
        assert_eq!(check_convexity(&state(Field::zeros(g), Field::zeros(g))).unwrap(), 0.0);
        let s = state(Field::zeros(g), Field::from_fn(g, f64::sin));
        let min = check_convexity(&s).unwrap();
        // smallest interior value sits at the first midpoint z = dz / 2
        assert!((min - (0.5 * g.spacing()).sin()).abs() < 1e-12);
        assert!(min > 0.0);
    }

    #[test]
    fn constant_q_has_flat_profile() {
        let g = grid();
        let u = Field::from_fn(g, |z| -z.cos());
        for c in [1.0, 2.5] {
            let w = derivative(&u, 1).unwrap().scaled(c);
            let (dq, range) = q_profile(&state(u.clone(), w), 1e-3).unwrap();
            assert!(dq.abs() < 1e-10 && range < 1e-10);
        }
        let s = state(Field::zeros(g), Field::zeros(g));
        assert!(matches!(check_q_monotonicity(&s, 1e-3), Err(Error::InsufficientSupport(_))));
    }

    #[test]
    fn characteristics_ratio_conventions() {
        let rec = DiagnosticsRecord { m0: 1.0, ..Default::default() };
        assert_eq!(check_uz_characteristics_bound(&rec, 0.5, 0.5), 1.0);
        assert_eq!(check_uz_characteristics_bound(&rec, 0.0, 0.0), 0.0);
    }
}
