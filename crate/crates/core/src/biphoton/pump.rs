use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::nm_to_thz;

/// Intensity time-bandwidth product of a transform-limited Gaussian pulse.
pub const GAUSSIAN_TBP: f64 = 2.0 * std::f64::consts::LN_2 / std::f64::consts::PI;

/// Transform-limited Gaussian pump pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSpec {
    #[serde(default = "default_center")]
    pub center_nm: f64,
    /// Intensity FWHM of the pulse in ps.
    #[serde(default = "default_duration")]
    pub fwhm_ps: f64,
}

fn default_center() -> f64 {
    792.0
}

fn default_duration() -> f64 {
    2.0
}

impl Default for PumpSpec {
    fn default() -> Self {
        Self { center_nm: default_center(), fwhm_ps: default_duration() }
    }
}

impl PumpSpec {
    pub fn new(center_nm: f64, fwhm_ps: f64) -> Result<Self> {
        let p = Self { center_nm, fwhm_ps };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.center_nm.is_finite() && self.center_nm > 0.0) {
            return Err(Error::InvalidArgument(format!("pump center {} nm must be positive", self.center_nm)));
        }
        if !(self.fwhm_ps.is_finite() && self.fwhm_ps > 0.0) {
            return Err(Error::InvalidArgument(format!("pump duration {} ps must be positive", self.fwhm_ps)));
        }
        Ok(())
    }

    pub fn center_thz(&self) -> f64 {
        nm_to_thz(self.center_nm).expect("validated pump wavelength")
    }

    /// FWHM of |α|² in THz.
    pub fn intensity_fwhm_thz(&self) -> f64 {
        GAUSSIAN_TBP / self.fwhm_ps
    }

    /// Standard deviation of the amplitude envelope α in THz.
    pub fn sigma_thz(&self) -> f64 {
        // |α|² = exp(-x²/σ²) has FWHM 2σ√ln2
        self.intensity_fwhm_thz() / (2.0 * std::f64::consts::LN_2.sqrt())
    }

    /// α(ν_s + ν_i), real with unit peak at the pump frequency.
    pub fn envelope(&self, nu_sum_thz: f64) -> f64 {
        self.envelope_at_detuning(nu_sum_thz - self.center_thz())
    }

    pub fn envelope_at_detuning(&self, detuning_thz: f64) -> f64 {
        let s = self.sigma_thz();
        (-detuning_thz * detuning_thz / (2.0 * s * s)).exp()
    }
}
