//! Periodic grids, fields and the spectral operators built on them.

mod fft;
mod field;
mod grid;
mod ops;

pub use field::{Field, ZERO_MEAN_RTOL};
pub use grid::{Layout, PeriodicGrid};
pub use ops::{
    dealias, derivative, eval_at_point, hilbert_transform, resample, spectral_tail_fraction,
    tail_fraction_within, velocity_from_vorticity, Dealias,
};
pub use realfft::num_complex::Complex64;
