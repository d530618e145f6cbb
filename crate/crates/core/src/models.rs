//! Right-hand sides for the wall system and the scalar model family, the
//! closed-form CLM solution, initial data and symmetry checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    dealias, derivative, hilbert_transform, velocity_from_vorticity, Dealias, Field, PeriodicGrid,
};

/// Which equation is being integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// `u_t + v u_z = 0`, `omega_t + v omega_z = u_z`, `v_z = H omega`.
    BoundarySystem,
    /// `omega_t = v_x omega`.
    Clm,
    /// `omega_t + v omega_x = v_x omega`.
    DeGregorio,
    /// `theta_t + theta_x H theta = 0`.
    Ccf,
    /// `omega_t + a v omega_x = v_x omega`.
    Osw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Convection coefficient `a`; read only for [`ModelKind::Osw`].
    pub osw_a: f64,
    /// When false the `v_x omega` term of the OSW family is dropped, leaving
    /// the pure transport limit `omega_t + v omega_x = 0` (with `a = 1`).
    pub stretching: bool,
}

impl ModelSpec {
    pub fn new(kind: ModelKind) -> Self {
        Self { kind, osw_a: 0.0, stretching: true }
    }

    pub fn boundary_system() -> Self {
        Self::new(ModelKind::BoundarySystem)
    }

    pub fn clm() -> Self {
        Self::new(ModelKind::Clm)
    }

    pub fn de_gregorio() -> Self {
        Self::new(ModelKind::DeGregorio)
    }

    pub fn ccf() -> Self {
        Self::new(ModelKind::Ccf)
    }

    pub fn osw(a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidArgument { name: "osw_a", reason: format!("{a} is not finite") });
        }
        Ok(Self { kind: ModelKind::Osw, osw_a: a, stretching: true })
    }

    pub fn is_scalar(&self) -> bool {
        self.kind != ModelKind::BoundarySystem
    }

    /// Coefficient of `v omega_x` in the OSW form; `None` outside that family.
    pub fn convection(&self) -> Option<f64> {
        match self.kind {
            ModelKind::Clm => Some(0.0),
            ModelKind::DeGregorio => Some(1.0),
            ModelKind::Osw => Some(self.osw_a),
            ModelKind::BoundarySystem | ModelKind::Ccf => None,
        }
    }
}

/// The pair `(u, omega)` at time `t`.
///
/// `u` is stored with zero mean; `u_offset` is the constant that was removed
/// from the initial data, so `u + u_offset` is the untranslated profile.
/// For scalar models `u` is identically zero and unused.
#[derive(Debug, Clone)]
pub struct ModelState {
    pub u: Field,
    pub omega: Field,
    pub time: f64,
    pub u_offset: f64,
}

impl ModelState {
    pub fn new(u: Field, omega: Field, time: f64) -> Result<Self> {
        Self::with_offset(u, omega, time, 0.0)
    }

    pub fn with_offset(u: Field, omega: Field, time: f64, u_offset: f64) -> Result<Self> {
        if u.grid() != omega.grid() {
            return Err(Error::GridMismatch);
        }
        if !(time.is_finite() && time >= 0.0) {
            return Err(Error::InvalidArgument { name: "time", reason: format!("{time} must be >= 0") });
        }
        let omega = omega.require_zero_mean()?;
        Ok(Self { u, omega, time, u_offset })
    }

    /// State of a scalar model: `u` is zero.
    pub fn scalar(omega: Field, time: f64) -> Result<Self> {
        let u = Field::zeros(*omega.grid());
        Self::new(u, omega, time)
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.omega.grid()
    }

    /// The untranslated transported quantity `u + u_offset`.
    pub fn literal_u(&self) -> Vec<f64> {
        self.u.values().iter().map(|v| v + self.u_offset).collect()
    }
}

fn product(a: &Field, b: &Field) -> Vec<f64> {
    a.values().iter().zip(b.values()).map(|(x, y)| x * y).collect()
}

/// `(du/dt, domega/dt)` for the wall system.
pub fn boundary_system_rhs(state: &ModelState, rule: Dealias) -> Result<(Field, Field)> {
    let grid = *state.grid();
    let v = velocity_from_vorticity(&state.omega)?;
    let u_z = derivative(&state.u, 1)?;
    let omega_z = derivative(&state.omega, 1)?;

    let du: Vec<f64> = v.values().iter().zip(u_z.values()).map(|(v, uz)| -v * uz).collect();
    let dw: Vec<f64> = v
        .values()
        .iter()
        .zip(omega_z.values())
        .zip(u_z.values())
        .map(|((v, wz), uz)| uz - v * wz)
        .collect();

    let du = dealias(&Field::new(grid, du)?, rule);
    let dw = dealias(&Field::new(grid, dw)?, rule);
    Ok((du, dw))
}

/// Time derivative of a scalar model field (`omega` for the OSW family, `theta` for CCF).
pub fn scalar_rhs(field: &Field, spec: &ModelSpec, rule: Dealias) -> Result<Field> {
    let grid = *field.grid();
    let rhs = match spec.kind {
        ModelKind::BoundarySystem => {
            return Err(Error::InvalidArgument {
                name: "spec",
                reason: "boundary_system is not a scalar model".into(),
            })
        }
        ModelKind::Ccf => {
            let h = hilbert_transform(field)?;
            let theta_x = derivative(field, 1)?;
            product(&theta_x, &h).into_iter().map(|p| -p).collect::<Vec<_>>()
        }
        _ => {
            let a = spec.convection().expect("OSW family member");
            let v_x = hilbert_transform(field)?;
            let stretch = if spec.stretching { 1.0 } else { 0.0 };
            if a == 0.0 {
                product(&v_x, field).into_iter().map(|p| stretch * p).collect()
            } else {
                let v = velocity_from_vorticity(field)?;
                let w_x = derivative(field, 1)?;
                v.values()
                    .iter()
                    .zip(w_x.values())
                    .zip(v_x.values().iter().zip(field.values()))
                    .map(|((v, wx), (vx, w))| -a * v * wx + stretch * vx * w)
                    .collect()
            }
        }
    };
    Ok(dealias(&Field::new(grid, rhs)?, rule))
}

/// `(du/dt, domega/dt)` for any model; scalar models report `du/dt = 0`.
pub fn rhs(state: &ModelState, spec: &ModelSpec, rule: Dealias) -> Result<(Field, Field)> {
    if spec.is_scalar() {
        let dw = scalar_rhs(&state.omega, spec, rule)?;
        Ok((Field::zeros(*state.grid()), dw))
    } else {
        boundary_system_rhs(state, rule)
    }
}

/// Denominator floor of the closed-form CLM solution.
pub const CLM_PROXIMITY_THRESHOLD: f64 = 1e-8;

/// Closed-form CLM solution `4 w0 / ((2 - t H w0)^2 + t^2 w0^2)`.
pub fn clm_exact_solution(omega0: &Field, t: f64) -> Result<Field> {
    let h = hilbert_transform(omega0)?;
    let mut min_den = f64::INFINITY;
    let values: Vec<f64> = omega0
        .values()
        .iter()
        .zip(h.values())
        .map(|(&w, &hw)| {
            let den = (2.0 - t * hw).powi(2) + (t * w).powi(2);
            min_den = min_den.min(den);
            4.0 * w / den
        })
        .collect();
    if min_den < CLM_PROXIMITY_THRESHOLD {
        return Err(Error::BlowupProximity { min_denominator: min_den });
    }
    Field::new(*omega0.grid(), values)
}

/// Which field a [`Mode`] contributes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    U,
    Omega,
}

/// One Fourier mode `cos * cos(kappa_k z) + sin * sin(kappa_k z)`, `kappa_k = 2 pi k / L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub field: Component,
    pub k: usize,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// Initial-data recipes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `u0 = a sin^2(mu z)`, `omega0 = 0`.
    PaperBlowup { a: f64 },
    /// Band-limited data assembled from a mode table.
    CustomModes { modes: Vec<Mode> },
}

fn modes_to_field(grid: PeriodicGrid, modes: &[Mode], which: Component) -> Result<Field> {
    let n = grid.n_points();
    let mut values = vec![0.0; n];
    for m in modes.iter().filter(|m| m.field == which) {
        if m.k == 0 || m.k >= n / 2 {
            return Err(Error::InvalidArgument {
                name: "modes",
                reason: format!("mode index {} outside 1..{}", m.k, n / 2),
            });
        }
        if !(m.cos.is_finite() && m.sin.is_finite()) {
            return Err(Error::InvalidArgument { name: "modes", reason: "non-finite coefficient".into() });
        }
        let kappa = grid.wavenumber(m.k);
        for (v, z) in values.iter_mut().zip(grid.points()) {
            *v += m.cos * (kappa * z).cos() + m.sin * (kappa * z).sin();
        }
    }
    Ok(Field::new(grid, values)?.project_zero_mean())
}

pub fn make_initial_data(initial: &InitialData, grid: PeriodicGrid) -> Result<ModelState> {
    match initial {
        InitialData::PaperBlowup { a } => {
            if !(a.is_finite() && *a > 0.0) {
                return Err(Error::InvalidArgument { name: "a", reason: format!("{a} must be > 0") });
            }
            let mu = grid.mu();
            let offset = 0.5 * a;
            let u = Field::from_fn(grid, |z| a * (mu * z).sin().powi(2) - offset).project_zero_mean();
            ModelState::with_offset(u, Field::zeros(grid), 0.0, offset)
        }
        InitialData::CustomModes { modes } => {
            let u = modes_to_field(grid, modes, Component::U)?;
            let omega = modes_to_field(grid, modes, Component::Omega)?;
            ModelState::new(u, omega, 0.0)
        }
    }
}

/// Max-norm distance of `u` from its even part and of `omega` from its odd
/// part under `z -> -z (mod L)`.
pub fn symmetry_error(state: &ModelState) -> (f64, f64) {
    let grid = state.grid();
    let u = state.u.values();
    let w = state.omega.values();
    let mut u_err: f64 = 0.0;
    let mut w_err: f64 = 0.0;
    for j in 0..grid.n_points() {
        let r = grid.reflect_index(j);
        u_err = u_err.max(0.5 * (u[j] - u[r]).abs());
        w_err = w_err.max(0.5 * (w[j] + w[r]).abs());
    }
    (u_err, w_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Layout;
    use std::f64::consts::PI;

    fn grid(n: usize, length: f64, layout: Layout) -> PeriodicGrid {
        PeriodicGrid::new(n, length, layout).unwrap()
    }

    #[test]
    fn rest_state_is_fixed_point() {
        let g = grid(32, 2.0 * PI, Layout::Midpoint);
        let s = ModelState::new(Field::zeros(g), Field::zeros(g), 0.0).unwrap();
        let (du, dw) = boundary_system_rhs(&s, Dealias::TwoThirds).unwrap();
        assert_eq!(du.max_abs(), 0.0);
        assert_eq!(dw.max_abs(), 0.0);
    }

    #[test]
    fn vorticity_source_is_u_z_when_omega_vanishes() {
        let g = grid(64, 2.0 * PI, Layout::Midpoint);
        let s = make_initial_data(&InitialData::PaperBlowup { a: 1.0 }, g).unwrap();
        let (du, dw) = boundary_system_rhs(&s, Dealias::TwoThirds).unwrap();
        let mu = g.mu();
        assert!(du.max_abs() < 1e-15);
        let expect = Field::from_fn(g, |z| mu * (2.0 * mu * z).sin());
        assert!(dw.max_diff(&expect) < 1e-13);
        assert!(dw.mean().abs() < 1e-15);
    }

    #[test]
    fn blowup_initial_data() {
        let g = grid(64, 2.0 * PI, Layout::Node);
        let s = make_initial_data(&InitialData::PaperBlowup { a: 1.0 }, g).unwrap();
        assert!(s.u.max_diff(&Field::from_fn(g, |z| -0.5 * z.cos())) < 1e-14);
        assert_eq!(s.omega.max_abs(), 0.0);
        assert_eq!(s.u_offset, 0.5);
        let (ue, wo) = symmetry_error(&s);
        assert!(ue < 1e-15 && wo == 0.0);
        assert!(make_initial_data(&InitialData::PaperBlowup { a: 0.0 }, g).is_err());
        assert!(make_initial_data(&InitialData::PaperBlowup { a: -1.0 }, g).is_err());
    }

    #[test]
    fn custom_modes_reject_bad_indices() {
        let g = grid(16, 1.0, Layout::Node);
        let bad = InitialData::CustomModes { modes: vec![Mode { field: Component::U, k: 8, cos: 1.0, sin: 0.0 }] };
        assert!(make_initial_data(&bad, g).is_err());
        let bad = InitialData::CustomModes { modes: vec![Mode { field: Component::U, k: 0, cos: 1.0, sin: 0.0 }] };
        assert!(make_initial_data(&bad, g).is_err());
    }

    #[test]
    fn symmetry_error_cases() {
        let g = grid(64, 2.0 * PI, Layout::Node);
        let mu = g.mu();
        let st = |u: Field, w: Field| ModelState::new(u, w, 0.0).unwrap();
        let (a, b) = symmetry_error(&st(
            Field::from_fn(g, |z| (2.0 * mu * z).cos()),
            Field::from_fn(g, |z| (2.0 * mu * z).sin()),
        ));
        assert!(a < 1e-14 && b < 1e-14);
        let (a, b) = symmetry_error(&st(Field::from_fn(g, |z| (2.0 * mu * z).sin()), Field::zeros(g)));
        assert!((a - 1.0).abs() < 1e-14 && b == 0.0);
        let (a, b) = symmetry_error(&st(Field::zeros(g), Field::from_fn(g, |z| (2.0 * mu * z).cos())));
        assert!(a == 0.0 && (b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn clm_rhs_for_cosine() {
        let g = grid(64, 2.0 * PI, Layout::Node);
        let w = Field::from_fn(g, f64::cos);
        let r = scalar_rhs(&w, &ModelSpec::clm(), Dealias::TwoThirds).unwrap();
        assert!(r.max_diff(&Field::from_fn(g, |z| z.sin() * z.cos())) < 1e-13);
        assert_eq!(scalar_rhs(&Field::zeros(g), &ModelSpec::ccf(), Dealias::None).unwrap().max_abs(), 0.0);
        assert!(scalar_rhs(&w, &ModelSpec::boundary_system(), Dealias::None).is_err());
    }

    #[test]
    fn clm_exact_solution_values() {
        let g = grid(64, 2.0 * PI, Layout::Node);
        let w0 = Field::from_fn(g, f64::cos);
        let at0 = clm_exact_solution(&w0, 0.0).unwrap();
        assert!(at0.max_diff(&w0) < 1e-15);
        let at1 = clm_exact_solution(&w0, 1.0).unwrap();
        assert!((at1.values()[0] - 0.8).abs() < 1e-13);
        // node 16 sits at z = pi/2 where the denominator is (2 - t)^2
        assert!(clm_exact_solution(&w0, 2.0 - 1e-5).is_err());
        assert!(matches!(clm_exact_solution(&w0, 2.0), Err(Error::BlowupProximity { .. })));
    }

    #[test]
    fn osw_special_cases() {
        assert_eq!(ModelSpec::clm().convection(), Some(0.0));
        assert_eq!(ModelSpec::de_gregorio().convection(), Some(1.0));
        assert!(ModelSpec::osw(f64::NAN).is_err());
        assert_eq!(ModelSpec::ccf().convection(), None);
    }
}
