use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::{check_kernel_inequalities, KernelReport};
use crate::error::{Error, Result};
use crate::norms::{verify_poincare, verify_sobolev_embedding};
use crate::spectral::{Field, Layout, PeriodicGrid};

pub const KERNEL_SAMPLES: usize = 10_000;
pub const FIELDS_PER_LENGTH: usize = 1_000;
pub const MARGIN_TOL: f64 = 1e-10;

/// Zero-mean trigonometric polynomial on modes `1..=bandwidth` with
/// coefficients uniform in `[-1, 1]`.
pub fn random_field<R: Rng>(grid: PeriodicGrid, bandwidth: usize, rng: &mut R) -> Field {
    let coeffs: Vec<(f64, f64)> = (0..bandwidth).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    Field::from_fn(grid, |z| {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let phase = grid.wavenumber(i + 1) * z;
                a * phase.cos() + b * phase.sin()
            })
            .sum()
    })
    .project_zero_mean()
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub kernel: KernelReport,
    /// Smallest `c ||f||_{V^1} - ||f||_{L^2}` seen.
    pub poincare_worst: f64,
    /// Smallest `c ||f_z||_{L^2} - ||f||_inf` seen.
    pub sobolev_worst: f64,
    pub fields: usize,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.poincare_worst >= -MARGIN_TOL && self.sobolev_worst >= -MARGIN_TOL
    }
}

/// Kernel inequality suite plus the Poincare and Sobolev margins on random
/// band-limited fields for `L` in `{pi, 2 pi, 10}`.
pub fn selftest(seed: u64) -> Result<SelftestReport> {
    let kernel = check_kernel_inequalities(KERNEL_SAMPLES, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut poincare_worst = f64::INFINITY;
    let mut sobolev_worst = f64::INFINITY;
    let mut fields = 0;
    for length in [PI, 2.0 * PI, 10.0] {
        let grid = PeriodicGrid::new(64, length, Layout::Node)?;
        for _ in 0..FIELDS_PER_LENGTH {
            let bandwidth = rng.gen_range(1..=12);
            let f = random_field(grid, bandwidth, &mut rng);
            poincare_worst = poincare_worst.min(verify_poincare(&f, 1, 0)?);
            sobolev_worst = sobolev_worst.min(verify_sobolev_embedding(&f)?);
            fields += 1;
        }
    }
    let report = SelftestReport { kernel, poincare_worst, sobolev_worst, fields };
    if !report.passed() {
        return Err(Error::InequalityViolation(format!(
            "worst Poincare margin {:e}, worst Sobolev margin {:e}",
            poincare_worst, sobolev_worst
        )));
    }
    Ok(report)
}
