//! Two-photon interference after the beamsplitter: exchange amplitude,
//! correlated spectral intensity, coincidence probability, the
//! frequency-difference marginal and comb analysis.

pub mod csi;
pub mod dip;
pub mod qudit;
pub mod toa;

pub use csi::{csi, csi_general, double_slit_identity, interference_amplitude, CsiGrid, DoubleSlitCheck};
pub use dip::{
    coincidence_probability, coincidence_probability_from_csi, dip_metrics, dip_scan, linspace, CoincidenceKernel,
    DipMetrics, DipScan,
};
pub use qudit::{extract_qudit, QuditDecomposition, Tooth, MIN_SAMPLES_PER_TOOTH};
pub use toa::{
    comb_contrast, default_separation, distinguishable_toa, find_peaks, marginal_toa, tooth_spacing, MarginalToa,
    PeakSet, BACKGROUND_FLOOR, DEFAULT_PEAK_THRESHOLD, RAYLEIGH_CONTRAST,
};

/// Analytic tooth offsets ν₂ − ν₁ = ±(2j−1)/(2τ) inside `|Δν| ≤ half_width`.
pub fn analytic_teeth(tau_ps: f64, half_width_thz: f64) -> Vec<f64> {
    if tau_ps == 0.0 {
        return Vec::new();
    }
    let step = 1.0 / tau_ps.abs();
    let mut out = Vec::new();
    let mut x = 0.5 * step;
    while x <= half_width_thz {
        out.push(-x);
        out.push(x);
        x += step;
    }
    out.sort_by(f64::total_cmp);
    out
}
