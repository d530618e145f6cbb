use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Placement of the collocation points within each cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// `z_j = j L / N`
    Node,
    /// `z_j = (j + 1/2) L / N`; contains neither `0` nor `L / 2`.
    Midpoint,
}

/// Uniform collocation mesh on the circle of circumference `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    n_points: usize,
    length: f64,
    layout: Layout,
}

impl PeriodicGrid {
    pub const MIN_POINTS: usize = 8;

    pub fn new(n_points: usize, length: f64, layout: Layout) -> Result<Self> {
        if n_points < Self::MIN_POINTS || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points} must be a power of two >= {}",
                Self::MIN_POINTS
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length = {length} must be positive")));
        }
        Ok(Self { n_points, length, layout })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n_points as f64
    }

    /// `mu = pi / L`, the scale of the cotangent kernel.
    pub fn mu(&self) -> f64 {
        PI / self.length
    }

    /// Position of the first collocation point.
    pub fn offset(&self) -> f64 {
        match self.layout {
            Layout::Node => 0.0,
            Layout::Midpoint => 0.5 * self.spacing(),
        }
    }

    pub fn point(&self, j: usize) -> f64 {
        self.offset() + j as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.point(j)).collect()
    }

    /// Angular wavenumber `2 pi k / L` of mode index `k`.
    pub fn wavenumber(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.length
    }

    /// Index of the point `-z_j (mod L)`.
    pub fn reflect_index(&self, j: usize) -> usize {
        let n = self.n_points;
        match self.layout {
            Layout::Node => (n - j) % n,
            Layout::Midpoint => n - 1 - j,
        }
    }

    /// Indices of the points lying strictly inside `(0, L/2)`.
    pub fn half_domain_indices(&self) -> std::ops::Range<usize> {
        let half = self.n_points / 2;
        match self.layout {
            Layout::Node => 1..half,
            Layout::Midpoint => 0..half,
        }
    }

    /// Same circle and layout with `factor` times as many points.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.n_points * factor, self.length, self.layout)
    }

    pub fn with_layout(&self, layout: Layout) -> Self {
        Self { layout, ..*self }
    }
}
