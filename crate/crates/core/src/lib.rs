//! Pseudospectral laboratory for the 1D wall model of axisymmetric Euler
//! flow and its scalar relatives (CLM, De Gregorio, CCF, OSW), with the
//! diagnostics used to study finite-time blowup.

pub mod diagnostics;
pub mod error;
pub mod integrator;
pub mod models;
pub mod norms;
pub mod runner;
pub mod spectral;

pub use error::{Error, Result};
