//! Dispersive-fiber spectrometer: frequency-to-time mapping, Monte-Carlo
//! time tagging and histogram reconstruction of the ToA and CSI.

pub mod events;
pub mod histogram;
pub mod map;
pub mod sampling;

pub use events::{check_gate, simulate_events, Channel, DetectorSpec, EventBatch, EventRecord, FWHM_PER_SIGMA};
pub use histogram::{
    analytic_toa, arrival_histogram, binned_csi, gaussian_blur, reconstruct_csi_histogram, relative_l2, toa_histogram,
    Histogram1D, Histogram2D, UniformBins,
};
pub use map::{toa_tooth_period_ps, DispersionMap, DEFAULT_DISPERSION_PS_NM_KM, DEFAULT_FIBER_KM, TRIGGER_PERIOD_NS};
pub use sampling::sample_pairs;
