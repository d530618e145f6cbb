//! Zero-mean Sobolev norms, the embedding constants of the circle and the
//! trigonometric mollifiers.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::models::ModelState;
use crate::spectral::{derivative, resample, Complex64, Field, Layout};

/// `||f||_{V^k} = ||d^k f / dz^k||_{L^2}` computed by Parseval.
///
/// For `k = 0` the field must have zero mean; for `k >= 1` the mean does not
/// enter and is ignored.
pub fn vk_norm(f: &Field, k: u32) -> Result<f64> {
    let grid = f.grid();
    let n = grid.n_points();
    if k as usize > n / 4 {
        return Err(Error::InvalidArgument { name: "k", reason: format!("{k} exceeds N/4") });
    }
    if k == 0 {
        f.check_zero_mean()?;
    }
    let s = f.spectrum();
    let mut sum = 0.0;
    for (j, c) in s.iter().enumerate().skip(1) {
        let weight = if j == n / 2 { 1.0 } else { 2.0 };
        sum += weight * grid.wavenumber(j).powi(2 * k as i32) * c.norm_sqr();
    }
    Ok((grid.length() * sum).sqrt())
}

/// `(||u||_{V^{k+1}}, ||omega||_{V^k})` for `k = 0..=k_max` together with the
/// product-space norm `||(u, omega)||_{W^k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormProfile {
    pub k_max: u32,
    pub vk_u: Vec<f64>,
    pub vk_omega: Vec<f64>,
    pub wk: Vec<f64>,
}

impl NormProfile {
    pub fn of(state: &ModelState, k_max: u32) -> Result<Self> {
        let mut vk_u = Vec::new();
        let mut vk_omega = Vec::new();
        let mut wk = Vec::new();
        for k in 0..=k_max {
            let a = vk_norm(&state.u, k + 1)?;
            let b = vk_norm(&state.omega, k)?;
            vk_u.push(a);
            vk_omega.push(b);
            wk.push(a.hypot(b));
        }
        Ok(Self { k_max, vk_u, vk_omega, wk })
    }
}

/// `||(u1 - u2, w1 - w2)||_{W^k}` between two states on the same grid.
pub fn w_distance(a: &ModelState, b: &ModelState, k: u32) -> Result<f64> {
    let du = a.u.axpy(-1.0, &b.u)?;
    let dw = a.omega.axpy(-1.0, &b.omega)?.project_zero_mean();
    Ok(vk_norm(&du, k + 1)?.hypot(vk_norm(&dw, k)?))
}

/// Poincare constant `L / (2 pi)` of the zero-mean circle.
pub fn poincare_constant(length: f64) -> f64 {
    length / (2.0 * PI)
}

/// Constant `L / (2 sqrt 3)` in `||f||_inf <= c ||f_z||_{L^2}`.
pub fn sobolev_constant(length: f64) -> f64 {
    length / (2.0 * 3f64.sqrt())
}

/// `c^{k-j} ||f||_{V^k} - ||f||_{V^j}`, nonnegative by the Poincare inequality.
pub fn verify_poincare(f: &Field, k: u32, j: u32) -> Result<f64> {
    if k <= j {
        return Err(Error::InvalidArgument { name: "k", reason: "need k > j".into() });
    }
    let low = vk_norm(f, j)?;
    if low == 0.0 {
        return Err(Error::UndefinedMargin);
    }
    let c = poincare_constant(f.grid().length());
    Ok(c.powi((k - j) as i32) * vk_norm(f, k)? - low)
}

/// `c ||f_z||_{L^2} - max|f|`, with the maximum taken on a 4x refined grid.
pub fn verify_sobolev_embedding(f: &Field) -> Result<f64> {
    f.check_zero_mean()?;
    let grid = *f.grid();
    let fine = resample(f, grid.refined(4)?.with_layout(Layout::Node))?;
    let sup = fine.max_abs().max(f.max_abs());
    if sup == 0.0 {
        return Err(Error::UndefinedMargin);
    }
    let f_z = derivative(f, 1)?;
    Ok(sobolev_constant(grid.length()) * vk_norm(&f_z, 0)? - sup)
}

/// `||proj0(f g)||_{V^1} / (||f||_{V^1} ||g||_{V^1})`, where `proj0` removes the mean.
pub fn algebra_ratio(f: &Field, g: &Field) -> Result<f64> {
    let values = f.values().iter().zip(g.values()).map(|(a, b)| a * b).collect();
    let fg = Field::new(*f.grid(), values)?.project_zero_mean();
    Ok(vk_norm(&fg, 1)? / (vk_norm(f, 1)? * vk_norm(g, 1)?))
}

/// Rigorous constant for [`algebra_ratio`] when the product is resolved:
/// `||(fg)'|| <= ||f||_inf ||g'|| + ||g||_inf ||f'|| <= 2 c ||f'|| ||g'||`.
pub fn algebra_constant(length: f64) -> f64 {
    2.0 * sobolev_constant(length)
}

/// Trigonometric approximations to the identity with a finite mode cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mollifier {
    /// Multiplier `max(0, 1 - |k| / n)`.
    Fejer,
    /// Multiplier `1` for `|k| <= n`, `2 - |k| / n` up to `2n`, zero beyond.
    DeLaValleePoussin,
}

impl Mollifier {
    /// Multiplier of mode index `k` at mode scale `n = ceil(1 / eps)`.
    pub fn multiplier(self, k: usize, n: usize) -> f64 {
        let r = k as f64 / n as f64;
        match self {
            Mollifier::Fejer => (1.0 - r).max(0.0),
            Mollifier::DeLaValleePoussin => (2.0 - r).clamp(0.0, 1.0),
        }
    }

    /// Highest mode index with a nonzero multiplier, exclusive.
    pub fn support(self, n: usize) -> usize {
        match self {
            Mollifier::Fejer => n,
            Mollifier::DeLaValleePoussin => 2 * n,
        }
    }
}

/// Mode scale `n = ceil(1 / eps)` of a mollifier parameter.
pub fn mode_scale(epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidArgument { name: "epsilon", reason: format!("{epsilon} not in (0, 1]") });
    }
    Ok((1.0 / epsilon).ceil() as usize)
}

/// Fejer smoothing `J_eps f`.
pub fn mollify(f: &Field, epsilon: f64) -> Result<Field> {
    mollify_with(f, epsilon, Mollifier::Fejer)
}

pub fn mollify_with(f: &Field, epsilon: f64, kernel: Mollifier) -> Result<Field> {
    let n = mode_scale(epsilon)?;
    f.check_zero_mean()?;
    let spectrum: Vec<Complex64> =
        f.spectrum().iter().enumerate().map(|(k, c)| c * kernel.multiplier(k, n)).collect();
    Ok(Field::from_spectrum(*f.grid(), spectrum).project_zero_mean())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::PeriodicGrid;

    fn grid(n: usize, length: f64) -> PeriodicGrid {
        PeriodicGrid::new(n, length, Layout::Node).unwrap()
    }

    #[test]
    fn vk_norm_of_sine() {
        let g = grid(64, 2.0 * PI);
        assert_eq!(vk_norm(&Field::zeros(g), 0).unwrap(), 0.0);
        let f = Field::from_fn(g, f64::sin);
        assert!((vk_norm(&f, 0).unwrap() - PI.sqrt()).abs() < 1e-13);
        assert!((vk_norm(&f, 2).unwrap() - PI.sqrt()).abs() < 1e-13);
        let f = Field::from_fn(g, |z| 1.0 + z.sin());
        assert!(vk_norm(&f, 0).is_err());
        assert!((vk_norm(&f, 1).unwrap() - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn poincare_examples() {
        let g = grid(64, 2.0 * PI);
        assert!(verify_poincare(&Field::from_fn(g, f64::sin), 1, 0).unwrap().abs() < 1e-13);
        let m = verify_poincare(&Field::from_fn(g, |z| (2.0 * z).sin()), 1, 0).unwrap();
        assert!((m - PI.sqrt()).abs() < 1e-12);
        assert!(matches!(verify_poincare(&Field::zeros(g), 1, 0), Err(Error::UndefinedMargin)));
        assert!(verify_poincare(&Field::zeros(g), 0, 1).is_err());
    }

    #[test]
    fn sobolev_example() {
        let g = grid(64, 2.0 * PI);
        let m = verify_sobolev_embedding(&Field::from_fn(g, f64::sin)).unwrap();
        let expect = PI / 3f64.sqrt() * PI.sqrt() - 1.0;
        assert!((m - expect).abs() < 1e-12);
        assert!(matches!(verify_sobolev_embedding(&Field::zeros(g)), Err(Error::UndefinedMargin)));
    }

    #[test]
    fn fejer_scales_first_mode() {
        let g = grid(64, 2.0 * PI);
        assert_eq!(mollify(&Field::zeros(g), 0.5).unwrap().max_abs(), 0.0);
        let f = Field::from_fn(g, f64::sin);
        let m = mollify(&f, 1.0 / 8.0).unwrap();
        assert!(m.max_diff(&f.scaled(7.0 / 8.0)) < 1e-14);
        assert!(mollify(&f, 0.0).is_err());
        assert!(mollify(&f, 1.5).is_err());
    }

    #[test]
    fn multipliers_are_monotone_with_compact_support() {
        for kernel in [Mollifier::Fejer, Mollifier::DeLaValleePoussin] {
            for n in [1, 3, 8] {
                assert_eq!(kernel.multiplier(0, n), 1.0);
                for k in 0..40 {
                    assert!(kernel.multiplier(k + 1, n) <= kernel.multiplier(k, n));
                    if k >= kernel.support(n) {
                        assert_eq!(kernel.multiplier(k, n), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn profile_combines_in_quadrature() {
        let g = grid(32, 2.0 * PI);
        let s = ModelState::new(Field::from_fn(g, |z| (2.0 * z).cos()), Field::from_fn(g, f64::sin), 0.0).unwrap();
        let p = NormProfile::of(&s, 2).unwrap();
        for k in 0..3 {
            let w2 = p.vk_u[k].powi(2) + p.vk_omega[k].powi(2);
            assert!((p.wk[k].powi(2) - w2).abs() <= 1e-12 * w2);
        }
    }
}
