//! Closed-form trigonometric polynomials and quadrature oracles that never
//! touch the FFT path.
#![allow(dead_code)]

use rand::Rng;
use wall1d::spectral::{Field, PeriodicGrid};

/// `sum_k a_k cos(kappa_k z) + b_k sin(kappa_k z)` with `kappa_k = 2 pi k / L`.
#[derive(Debug, Clone)]
pub struct TrigPoly {
    pub length: f64,
    pub terms: Vec<(usize, f64, f64)>,
}

impl TrigPoly {
    pub fn random<R: Rng>(rng: &mut R, length: f64, bandwidth: usize) -> Self {
        let terms = (1..=bandwidth).map(|k| (k, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        Self { length, terms }
    }

    pub fn kappa(&self, k: usize) -> f64 {
        2.0 * std::f64::consts::PI * k as f64 / self.length
    }

    /// Value of the `order`-th derivative at `z`.
    pub fn eval_derivative(&self, z: f64, order: u32) -> f64 {
        self.terms
            .iter()
            .map(|&(k, a, b)| {
                let kap = self.kappa(k);
                let phase = kap * z + order as f64 * std::f64::consts::FRAC_PI_2;
                kap.powi(order as i32) * (a * phase.cos() + b * phase.sin())
            })
            .sum()
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.eval_derivative(z, 0)
    }

    pub fn field(&self, grid: PeriodicGrid) -> Field {
        Field::from_fn(grid, |z| self.eval(z))
    }

    pub fn max_mode(&self) -> usize {
        self.terms.iter().map(|t| t.0).max().unwrap_or(0)
    }
}

/// `(1/L) PV int_0^L f(y) cot(mu (z - y)) dy` by the symmetric midpoint rule
/// with `m` nodes; the singular pair `s, L - s` is folded together.
pub fn hilbert_pv(f: &TrigPoly, z: f64, m: usize) -> f64 {
    let length = f.length;
    let mu = std::f64::consts::PI / length;
    let h = length / m as f64;
    let mut sum = 0.0;
    for j in 0..m / 2 {
        let s = (j as f64 + 0.5) * h;
        sum += (f.eval(z - s) - f.eval(z + s)) / (mu * s).tan();
    }
    sum * h / length
}

/// `(1/pi) int_0^L f(z - s) log|sin(mu s)| ds` with the logarithmic singularity
/// handled by subtracting `f(z)` and using `int_0^L log|sin(mu s)| ds = -L log 2`.
pub fn velocity_log_kernel(f: &TrigPoly, z: f64, m: usize) -> f64 {
    let length = f.length;
    let mu = std::f64::consts::PI / length;
    let h = length / m as f64;
    let fz = f.eval(z);
    let mut sum = 0.0;
    for j in 0..m {
        let s = (j as f64 + 0.5) * h;
        sum += (f.eval(z - s) - fz) * (mu * s).sin().abs().ln();
    }
    (sum * h - fz * length * std::f64::consts::LN_2) / std::f64::consts::PI
}

/// `(1/L) int_0^L f(z) cot(mu z) dz` for odd `f`, by the midpoint rule.
pub fn cot_moment(f: &TrigPoly, m: usize) -> f64 {
    let length = f.length;
    let mu = std::f64::consts::PI / length;
    let h = length / m as f64;
    (0..m).map(|j| {
        let z = (j as f64 + 0.5) * h;
        f.eval(z) / (mu * z).tan()
    }).sum::<f64>() * h / length
}

/// `int_0^L |f^(k)|^2 dz` by the trapezoid rule on `m` nodes.
pub fn derivative_energy(f: &TrigPoly, k: u32, m: usize) -> f64 {
    let h = f.length / m as f64;
    (0..m).map(|j| f.eval_derivative(j as f64 * h, k).powi(2)).sum::<f64>() * h
}

pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// [`hilbert_pv`] at every point of `grid` with `4 N` quadrature nodes. The
/// nodes `z +- s` all fall on a grid eight times finer, so the polynomial is
/// tabulated once there.
pub fn hilbert_pv_on_grid(f: &TrigPoly, grid: &PeriodicGrid) -> Vec<f64> {
    let n = grid.n_points();
    let fine_h = grid.spacing() / 8.0;
    let table: Vec<f64> = (0..8 * n).map(|k| f.eval(grid.offset() + k as f64 * fine_h)).collect();
    let mu = std::f64::consts::PI / f.length;
    let m = 4 * n;
    let h = f.length / m as f64;
    let cot: Vec<f64> = (0..m / 2).map(|j| 1.0 / (mu * (j as f64 + 0.5) * h).tan()).collect();
    (0..n)
        .map(|i| {
            let sum: f64 = cot
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let (centre, step) = (8 * i + 8 * n, 2 * j + 1);
                    (table[(centre - step) % (8 * n)] - table[(centre + step) % (8 * n)]) * c
                })
                .sum();
            sum * h / f.length
        })
        .collect()
}
