//! Complete source descriptions, marginal-width calibration and the
//! built-in configurations.

use serde::{Deserialize, Serialize};

use crate::dispersion::{CrystalSpec, Dispersion, PhaseIndices, Poling, TaylorDispersion};
use crate::error::{Error, Result};
use crate::grid::FreqGrid1D;
use crate::units::SPEED_OF_LIGHT_NM_THZ;

use super::filter::FilterSpec;
use super::jsa::{assemble_jsa, assemble_jsa_raw, marginal_spectrum, Arm, JsaGrid};
use super::pump::PumpSpec;

pub const DESIGN_WAVELENGTH_NM: f64 = 1584.0;
pub const CRYSTAL_LENGTH_MM: f64 = 40.0;

/// Inverse group velocities of the Taylor model, ps/mm.
pub const INV_VG_PUMP: f64 = 7.205;
pub const INV_VG_SIGNAL_IDLER: f64 = 7.195;
/// Pump inverse group velocity of the figure and unfiltered sources. Equal to
/// the signal/idler value so that the ridge stays centered on the pump
/// frequency.
pub const FIGURE_INV_VG_PUMP: f64 = INV_VG_SIGNAL_IDLER;
/// Signal/idler GVD of the figure configuration, ps²/mm.
pub const FIGURE_GVD: f64 = 5.066e-4;
/// Residual design-point mismatch of the figure configuration, rad/mm.
pub const FIGURE_DETUNING: f64 = 0.14;
pub const FIGURE_EDGE_NM: f64 = 1.0;
/// Long-pass cut-on giving a 22 nm marginal on the default grid.
pub const FIGURE_CUT_ON_NM: f64 = 1574.6769;
/// Gaussian apodization giving a 22 nm marginal for the ideal source.
pub const IDEAL_APODIZATION_NM: f64 = 31.086;
/// GVD giving a 35 nm marginal without filters, ps²/mm.
pub const UNFILTERED_GVD: f64 = 1.2160e-3;

/// Phase indices at 792/1584 nm for an o-polarized pump, e signal and o idler.
pub const PHASE_INDICES: PhaseIndices = PhaseIndices { pump: 2.149_432, signal: 2.111_895, idler: 2.113_052 };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    #[serde(default)]
    pub pump: PumpSpec,
    pub crystal: CrystalSpec,
    #[serde(default)]
    pub filter_signal: FilterSpec,
    #[serde(default)]
    pub filter_idler: FilterSpec,
}

impl SourceSpec {
    pub fn assemble(&self, axis: FreqGrid1D) -> Result<JsaGrid> {
        assemble_jsa(&self.pump, &self.crystal, &self.filter_signal, &self.filter_idler, axis)
    }

    pub fn assemble_raw(&self, axis: FreqGrid1D) -> Result<JsaGrid> {
        assemble_jsa_raw(&self.pump, &self.crystal, &self.filter_signal, &self.filter_idler, axis)
    }

    pub fn validate(&self) -> Result<()> {
        self.pump.validate()?;
        self.crystal.validate()?;
        self.filter_signal.validate()?;
        self.filter_idler.validate()
    }

    /// Signal-arm marginal FWHM in nm, `None` when it does not fit on `axis`.
    pub fn marginal_fwhm_nm(&self, axis: FreqGrid1D) -> Result<Option<f64>> {
        let jsa = self.assemble_raw(axis)?.normalized()?;
        Ok(marginal_spectrum(&jsa, Arm::Signal).fwhm_nm)
    }
}

/// Parameter adjusted to hit a target marginal FWHM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationKnob {
    /// Cut-on of every long-pass filter in both arms.
    LongPassCutOn,
    /// Width of every Gaussian filter in both arms.
    GaussianFwhm,
    /// Signal and idler GVD of a Taylor crystal.
    Gvd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    pub target_fwhm_nm: f64,
    pub knob: CalibrationKnob,
    #[serde(default)]
    pub bracket: Option<[f64; 2]>,
}

impl CalibrationKnob {
    fn apply(self, source: &SourceSpec, value: f64) -> Result<SourceSpec> {
        let mut s = source.clone();
        let touched = match self {
            CalibrationKnob::LongPassCutOn => s.filter_signal.set_cut_on(value) | s.filter_idler.set_cut_on(value),
            CalibrationKnob::GaussianFwhm => {
                s.filter_signal.set_gaussian_fwhm(value) | s.filter_idler.set_gaussian_fwhm(value)
            }
            CalibrationKnob::Gvd => match &mut s.crystal.dispersion {
                Dispersion::Taylor(t) => {
                    t.gvd_signal = value;
                    t.gvd_idler = value;
                    true
                }
                Dispersion::Sellmeier(_) => false,
            },
        };
        if !touched {
            return Err(Error::InvalidArgument(format!("calibration knob {self:?} has nothing to adjust")));
        }
        Ok(s)
    }

    fn default_bracket(self, axis: &FreqGrid1D) -> [f64; 2] {
        match self {
            CalibrationKnob::LongPassCutOn => {
                let center = SPEED_OF_LIGHT_NM_THZ / axis.center();
                [center - 60.0, center]
            }
            CalibrationKnob::GaussianFwhm => [1.0, 500.0],
            CalibrationKnob::Gvd => [1e-6, 1e-1],
        }
    }

    fn geometric(self) -> bool {
        matches!(self, CalibrationKnob::Gvd)
    }
}

/// Bisect `knob` until the marginal FWHM on `axis` equals the target.
/// Returns the adjusted source and the knob value.
pub fn calibrate_marginal_fwhm(
    source: &SourceSpec,
    axis: FreqGrid1D,
    calibration: &Calibration,
) -> Result<(SourceSpec, f64)> {
    let target = calibration.target_fwhm_nm;
    if !(target.is_finite() && target > 0.0) {
        return Err(Error::InvalidArgument(format!("target FWHM {target} nm must be positive")));
    }
    let knob = calibration.knob;
    let [mut lo, mut hi] = calibration.bracket.unwrap_or_else(|| knob.default_bracket(&axis));
    if !(lo < hi) || (knob.geometric() && lo <= 0.0) {
        return Err(Error::InvalidArgument(format!("invalid calibration bracket [{lo}, {hi}]")));
    }
    let residual = |v: f64| -> Result<f64> {
        let width = knob.apply(source, v)?.marginal_fwhm_nm(axis)?;
        Ok(width.unwrap_or(f64::INFINITY) - target)
    };
    let r_lo = residual(lo)?;
    let r_hi = residual(hi)?;
    if r_lo.signum() == r_hi.signum() {
        return Err(Error::Solver(format!("target {target} nm not bracketed by {knob:?} in [{lo}, {hi}]")));
    }
    let increasing = r_hi > r_lo;
    for _ in 0..60 {
        let mid = if knob.geometric() { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if (residual(mid)? < 0.0) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-10 * hi.abs() {
            break;
        }
    }
    let value = if knob.geometric() { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
    Ok((knob.apply(source, value)?, value))
}

/// ±40 nm around 1584 nm with 1024 samples per axis.
pub fn default_axis() -> FreqGrid1D {
    FreqGrid1D::around_wavelength(DESIGN_WAVELENGTH_NM, 40.0, 1024).expect("valid default grid")
}

fn taylor(inv_vg_pump: f64, gvd: f64) -> TaylorDispersion {
    TaylorDispersion {
        nu0_thz: SPEED_OF_LIGHT_NM_THZ / DESIGN_WAVELENGTH_NM,
        inv_vg_pump,
        inv_vg_signal: INV_VG_SIGNAL_IDLER,
        inv_vg_idler: INV_VG_SIGNAL_IDLER,
        gvd_pump: 0.0,
        gvd_signal: gvd,
        gvd_idler: gvd,
        phase_index: Some(PHASE_INDICES),
    }
}

fn crystal(inv_vg_pump: f64, gvd: f64, detuning: f64) -> CrystalSpec {
    CrystalSpec {
        length_mm: CRYSTAL_LENGTH_MM,
        poling: Poling::Matched { detuning_rad_per_mm: detuning },
        dispersion: Dispersion::Taylor(taylor(inv_vg_pump, gvd)),
    }
}

/// Figure-reproduction source: group-velocity-matched crystal with weak GVD
/// and a small design detuning, long-pass filters on both arms (22 nm
/// marginal).
pub fn figure_source() -> SourceSpec {
    let lpf = FilterSpec::LongPass { cut_on_nm: FIGURE_CUT_ON_NM, edge_nm: FIGURE_EDGE_NM };
    SourceSpec {
        pump: PumpSpec::default(),
        crystal: crystal(FIGURE_INV_VG_PUMP, FIGURE_GVD, FIGURE_DETUNING),
        filter_signal: lpf.clone(),
        filter_idler: lpf,
    }
}

/// Same crystal as [`figure_source`] without filters, GVD set for a 35 nm
/// marginal.
pub fn unfiltered_source() -> SourceSpec {
    SourceSpec {
        pump: PumpSpec::default(),
        crystal: crystal(FIGURE_INV_VG_PUMP, UNFILTERED_GVD, FIGURE_DETUNING),
        filter_signal: FilterSpec::Open,
        filter_idler: FilterSpec::Open,
    }
}

/// First-order crystal with pump group-velocity mismatch, exactly phase matched on the anti-diagonal,
/// with identical Gaussian apodization on both arms.
pub fn ideal_source() -> SourceSpec {
    let apod = FilterSpec::Gaussian { center_nm: DESIGN_WAVELENGTH_NM, fwhm_nm: IDEAL_APODIZATION_NM };
    SourceSpec {
        pump: PumpSpec::default(),
        crystal: crystal(INV_VG_PUMP, 0.0, 0.0),
        filter_signal: apod.clone(),
        filter_idler: apod,
    }
}
