//! The kernel `K(w) = -w log|(w + 1)/(w - 1)|` and its two inequalities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// `log|(w + 1)/(w - 1)| = 2 atanh(min(w, 1/w))`, accurate near 0 and infinity.
fn log_ratio(w: f64) -> f64 {
    if w < 1.0 {
        2.0 * w.atanh()
    } else {
        2.0 * w.recip().atanh()
    }
}

pub fn kernel_k(w: f64) -> Result<f64> {
    if w.is_nan() || w < 0.0 {
        return Err(Error::KernelDomain(w));
    }
    if w == 1.0 {
        return Err(Error::SingularKernel(w));
    }
    if w == 0.0 {
        return Ok(0.0);
    }
    Ok(-w * log_ratio(w))
}

/// Worst margins found by [`check_kernel_inequalities`]; both are `<= 0` when the
/// inequalities hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelReport {
    pub samples: usize,
    /// `max_w K(w) + K(1/w) + 2`.
    pub symmetric_sum_max: f64,
    pub symmetric_sum_argmax: f64,
    /// `max_{w in [0,1)} K(w)`.
    pub lower_k_max: f64,
    /// `max_{w in [0,1)} K(1/w) + 2`.
    pub upper_k_plus_two_max: f64,
}

pub const KERNEL_TOL: f64 = 1e-12;

/// Samples `w` in `(0, 1) U (1, 100)` plus the near-endpoint values
/// `{1e-8, 1 - 1e-8, 1 + 1e-8, 100}` and checks
/// `K(w) + K(1/w) + 2 <= 0`, and for `w < 1`: `K(w) <= 0`, `K(1/w) <= -2`.
pub fn check_kernel_inequalities(samples: usize, seed: u64) -> Result<KernelReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument { name: "samples", reason: "must be >= 1".into() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ws = vec![1e-8, 1.0 - 1e-8, 1.0 + 1e-8, 100.0];
    for i in 0..samples {
        let w = if i % 2 == 0 { rng.gen_range(0.0..1.0) } else { rng.gen_range(1.0..100.0) };
        if w > 0.0 && w != 1.0 {
            ws.push(w);
        }
    }

    let mut report = KernelReport {
        samples: ws.len(),
        symmetric_sum_max: f64::NEG_INFINITY,
        symmetric_sum_argmax: f64::NAN,
        lower_k_max: f64::NEG_INFINITY,
        upper_k_plus_two_max: f64::NEG_INFINITY,
    };
    for &w in &ws {
        let sum = kernel_k(w)? + kernel_k(w.recip())? + 2.0;
        if sum > report.symmetric_sum_max {
            report.symmetric_sum_max = sum;
            report.symmetric_sum_argmax = w;
        }
        if w < 1.0 {
            report.lower_k_max = report.lower_k_max.max(kernel_k(w)?);
            report.upper_k_plus_two_max = report.upper_k_plus_two_max.max(kernel_k(w.recip())? + 2.0);
        }
    }
    if report.symmetric_sum_max > KERNEL_TOL {
        return Err(Error::InequalityViolation(format!(
            "K(w) + K(1/w) + 2 = {:e} at w = {}",
            report.symmetric_sum_max, report.symmetric_sum_argmax
        )));
    }
    if report.lower_k_max > KERNEL_TOL {
        return Err(Error::InequalityViolation(format!("K(w) = {:e} > 0 on [0, 1)", report.lower_k_max)));
    }
    if report.upper_k_plus_two_max > KERNEL_TOL {
        return Err(Error::InequalityViolation(format!(
            "K(1/w) + 2 = {:e} > 0 on [0, 1)",
            report.upper_k_plus_two_max
        )));
    }
    Ok(report)
}
