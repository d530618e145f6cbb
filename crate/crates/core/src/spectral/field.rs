use std::sync::OnceLock;

use realfft::num_complex::Complex64;

use super::fft;
use super::grid::PeriodicGrid;
use crate::error::{Error, Result};

/// Tolerance below which a field counts as zero-mean: `1e-12 (max|f| + 1)`.
pub const ZERO_MEAN_RTOL: f64 = 1e-12;

/// A real periodic function sampled on a [`PeriodicGrid`].
///
/// The half-storage spectrum is computed on first use and dropped whenever
/// the values change.
#[derive(Debug, Clone)]
pub struct Field {
    grid: PeriodicGrid,
    values: Vec<f64>,
    spectrum: OnceLock<Vec<Complex64>>,
    zero_mean: bool,
}

impl Field {
    pub fn new(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch { expected: grid.n_points(), got: values.len() });
        }
        Ok(Self { grid, values, spectrum: OnceLock::new(), zero_mean: false })
    }

    /// Builds a field that must stay zero-mean; fails if the mean is above tolerance.
    pub fn zero_mean(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values)?.require_zero_mean()
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n_points()],
            spectrum: OnceLock::new(),
            zero_mean: true,
        }
    }

    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Self { grid, values, spectrum: OnceLock::new(), zero_mean: false }
    }

    /// Inverse transform of a half-storage spectrum in the normalization of [`Field::spectrum`].
    pub fn from_spectrum(grid: PeriodicGrid, spectrum: Vec<Complex64>) -> Self {
        let values = fft::inverse(&spectrum, grid.n_points());
        let cache = OnceLock::new();
        let mut spectrum = spectrum;
        let n = grid.n_points();
        spectrum[0].im = 0.0;
        spectrum[n / 2].im = 0.0;
        let _ = cache.set(spectrum);
        Self { grid, values, spectrum: cache, zero_mean: false }
    }

    pub(crate) fn from_spectrum_zero_mean(grid: PeriodicGrid, mut spectrum: Vec<Complex64>) -> Self {
        spectrum[0] = Complex64::new(0.0, 0.0);
        let mut f = Self::from_spectrum(grid, spectrum);
        f.zero_mean = true;
        f
    }

    pub fn require_zero_mean(mut self) -> Result<Self> {
        self.check_zero_mean()?;
        self.zero_mean = true;
        Ok(self)
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_zero_mean_required(&self) -> bool {
        self.zero_mean
    }

    /// Replaces the samples and invalidates the cached spectrum.
    pub fn set_values(&mut self, values: Vec<f64>) -> Result<()> {
        if values.len() != self.grid.n_points() {
            return Err(Error::LengthMismatch { expected: self.grid.n_points(), got: values.len() });
        }
        self.values = values;
        self.spectrum = OnceLock::new();
        if self.zero_mean {
            self.check_zero_mean()?;
        }
        Ok(())
    }

    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| fft::forward(&self.values))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn zero_mean_tolerance(&self) -> f64 {
        ZERO_MEAN_RTOL * (self.max_abs() + 1.0)
    }

    pub fn check_zero_mean(&self) -> Result<()> {
        let mean = self.mean();
        let tolerance = self.zero_mean_tolerance();
        if mean.abs() > tolerance || !mean.is_finite() {
            return Err(Error::NonZeroMean { mean, tolerance });
        }
        Ok(())
    }

    /// Subtracts the mean. Intended for preparing initial data only.
    pub fn project_zero_mean(&self) -> Field {
        let mean = self.mean();
        Field {
            grid: self.grid,
            values: self.values.iter().map(|v| v - mean).collect(),
            spectrum: OnceLock::new(),
            zero_mean: true,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Pointwise linear combination `self + scale * other`.
    pub fn axpy(&self, scale: f64, other: &Field) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + scale * b).collect();
        Ok(Field {
            grid: self.grid,
            values,
            spectrum: OnceLock::new(),
            zero_mean: false,
        })
    }

    pub fn scaled(&self, scale: f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|v| scale * v).collect(),
            spectrum: OnceLock::new(),
            zero_mean: self.zero_mean,
        }
    }

    /// Maximum pointwise distance to another field on the same grid.
    pub fn max_diff(&self, other: &Field) -> f64 {
        self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}
