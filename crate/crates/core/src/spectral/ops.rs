use realfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::Field;
use super::grid::PeriodicGrid;
use crate::error::{Error, Result};

/// Post-product filtering rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dealias {
    /// Zero every mode with index above `floor(N / 3)`.
    TwoThirds,
    None,
}

impl Dealias {
    /// Highest mode index that survives the rule.
    pub fn cutoff(self, n_points: usize) -> usize {
        match self {
            Dealias::TwoThirds => n_points / 3,
            Dealias::None => n_points / 2,
        }
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Spectral derivative of the given order. The result has zero mean.
pub fn derivative(f: &Field, order: u32) -> Result<Field> {
    if order == 0 {
        return Err(Error::InvalidArgument { name: "order", reason: "must be >= 1".into() });
    }
    let grid = *f.grid();
    let n = grid.n_points();
    let src = f.spectrum();
    let mut out = vec![ZERO; src.len()];
    // (i kappa)^order = kappa^order * i^order
    let phase = match order % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    for k in 1..n / 2 {
        out[k] = src[k] * phase * grid.wavenumber(k).powi(order as i32);
    }
    // The Nyquist mode has no odd derivative on the grid.
    if order % 2 == 0 {
        out[n / 2] = src[n / 2] * phase * grid.wavenumber(n / 2).powi(order as i32);
    }
    Ok(Field::from_spectrum_zero_mean(grid, out))
}

/// Periodic Hilbert transform `(1/L) PV int omega(y) cot(mu (z - y)) dy`,
/// realized as the multiplier `-i sgn(k)`, so that `H sin = -cos`.
pub fn hilbert_transform(omega: &Field) -> Result<Field> {
    omega.check_zero_mean()?;
    let grid = *omega.grid();
    let n = grid.n_points();
    let src = omega.spectrum();
    let mut out = vec![ZERO; src.len()];
    for k in 1..n / 2 {
        out[k] = Complex64::new(src[k].im, -src[k].re);
    }
    Ok(Field::from_spectrum_zero_mean(grid, out))
}

/// Zero-mean velocity `v` with `v_z = H omega`.
pub fn velocity_from_vorticity(omega: &Field) -> Result<Field> {
    omega.check_zero_mean()?;
    let grid = *omega.grid();
    let n = grid.n_points();
    let src = omega.spectrum();
    let mut out = vec![ZERO; src.len()];
    // (-i sgn k) / (i kappa) = -1 / |kappa|
    for k in 1..n / 2 {
        out[k] = -src[k] / grid.wavenumber(k);
    }
    Ok(Field::from_spectrum_zero_mean(grid, out))
}

/// Evaluates the trigonometric interpolant of `f` at an arbitrary point.
pub fn eval_at_point(f: &Field, z: f64) -> f64 {
    let grid = f.grid();
    let n = grid.n_points();
    let s = f.spectrum();
    let x = z - grid.offset();
    let mut acc = s[0].re;
    for (k, c) in s.iter().enumerate().take(n / 2).skip(1) {
        let theta = grid.wavenumber(k) * x;
        acc += 2.0 * (c.re * theta.cos() - c.im * theta.sin());
    }
    acc + s[n / 2].re * (grid.wavenumber(n / 2) * x).cos()
}

/// Trigonometric interpolation of `f` onto a finer grid of the same circle.
pub fn resample(f: &Field, target: PeriodicGrid) -> Result<Field> {
    let src_grid = f.grid();
    let n = src_grid.n_points();
    let m = target.n_points();
    if m < n || (target.length() - src_grid.length()).abs() > 1e-14 * src_grid.length() {
        return Err(Error::InvalidArgument {
            name: "target",
            reason: "must be a refinement of the source grid".into(),
        });
    }
    let shift = target.offset() - src_grid.offset();
    let s = f.spectrum();
    let mut out = vec![ZERO; m / 2 + 1];
    out[0] = s[0];
    for k in 1..=n / 2 {
        let phase = Complex64::from_polar(1.0, src_grid.wavenumber(k) * shift);
        // A Nyquist bin of the source becomes an interior pair on the target.
        let c = if k == n / 2 && m > n { 0.5 * s[k] } else { s[k] };
        out[k] = c * phase;
    }
    Ok(Field::from_spectrum(target, out))
}

pub fn dealias(f: &Field, rule: Dealias) -> Field {
    match rule {
        Dealias::None => f.clone(),
        Dealias::TwoThirds => {
            let grid = *f.grid();
            let cutoff = rule.cutoff(grid.n_points());
            let mut spec = f.spectrum().to_vec();
            for c in spec.iter_mut().skip(cutoff + 1) {
                *c = ZERO;
            }
            Field::from_spectrum(grid, spec)
        }
    }
}

/// Fraction of the non-mean energy in modes `|k| >= 3N/8`. Zero for the zero field.
pub fn spectral_tail_fraction(f: &Field) -> f64 {
    tail_fraction_within(f, f.grid().n_points() / 2)
}

/// Fraction of the non-mean energy in the top quarter `|k| >= 3 k_max / 4` of
/// a band `1..=k_max`. With `k_max = N/2` this is [`spectral_tail_fraction`].
pub fn tail_fraction_within(f: &Field, k_max: usize) -> f64 {
    let s = f.spectrum();
    let n = f.grid().n_points();
    let start = (3 * k_max).div_ceil(4);
    let mut total = 0.0;
    let mut tail = 0.0;
    for (k, c) in s.iter().enumerate().skip(1) {
        // Interior bins stand for the pair +k and -k.
        let weight = if k == n / 2 { 1.0 } else { 2.0 };
        let e = weight * c.norm_sqr();
        total += e;
        if k >= start {
            tail += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}
