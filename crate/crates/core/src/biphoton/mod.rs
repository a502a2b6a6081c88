//! Joint spectral amplitude of the photon pair: pump envelope, phase
//! matching and filters.

pub mod filter;
pub mod jsa;
pub mod pump;
pub mod source;

pub use filter::FilterSpec;
pub use jsa::{
    assemble_jsa, assemble_jsa_raw, marginal_spectrum, phase_matching_amplitude, sinc, Arm, JsaGrid, Marginal,
    TRUNCATION_LIMIT,
};
pub use pump::{PumpSpec, GAUSSIAN_TBP};
pub use source::{
    calibrate_marginal_fwhm, default_axis, figure_source, ideal_source, unfiltered_source, Calibration,
    CalibrationKnob, SourceSpec,
};
