//! Simulation of spectrally resolved two-photon interference for
//! frequency-entangled comb states produced by SPDC.
//!
//! The crate is organized bottom-up: [`units`], [`grid`] and [`quad`] provide
//! numerical plumbing, [`dispersion`] and [`biphoton`] build the joint spectral
//! amplitude, [`interference`] computes HOM observables and comb metrics, and
//! [`spectrometer`] models the dispersive-fiber time-tagging measurement.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod biphoton;
pub mod dispersion;
pub mod error;
pub mod grid;
pub mod interference;
pub mod io;
pub mod quad;
pub mod spectrometer;
pub mod units;

pub use error::{Error, Result};
pub use grid::{FreqGrid1D, Grid2D};
pub use num_complex::Complex64;
pub use units::{DelayTime, Frequency, Wavelength};
