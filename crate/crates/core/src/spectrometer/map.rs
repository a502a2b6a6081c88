use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::SPEED_OF_LIGHT_NM_THZ;

/// Standard single-mode fiber near 1584 nm, ps/(nm·km).
pub const DEFAULT_DISPERSION_PS_NM_KM: f64 = 18.0;
pub const DEFAULT_FIBER_KM: f64 = 7.5;
/// One period of a 76 MHz pump, ns.
pub const TRIGGER_PERIOD_NS: f64 = 1e3 / 76.0;

fn default_dispersion() -> f64 {
    DEFAULT_DISPERSION_PS_NM_KM
}
fn default_fiber() -> f64 {
    DEFAULT_FIBER_KM
}
fn default_reference() -> f64 {
    1584.0
}
fn default_offset() -> f64 {
    0.5 * TRIGGER_PERIOD_NS
}
fn default_band() -> [f64; 2] {
    [1540.0, 1630.0]
}

/// Affine wavelength-to-time transfer of a dispersive fiber:
/// `t = offset + D·L·(λ − λ_ref)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionMap {
    #[serde(default = "default_dispersion")]
    pub dispersion_ps_nm_km: f64,
    #[serde(default = "default_fiber")]
    pub fiber_km: f64,
    #[serde(default = "default_reference")]
    pub reference_nm: f64,
    #[serde(default = "default_offset")]
    pub offset_ns: f64,
    /// Calibrated wavelength band, nm.
    #[serde(default = "default_band")]
    pub band_nm: [f64; 2],
}

impl Default for DispersionMap {
    fn default() -> Self {
        Self {
            dispersion_ps_nm_km: default_dispersion(),
            fiber_km: default_fiber(),
            reference_nm: default_reference(),
            offset_ns: default_offset(),
            band_nm: default_band(),
        }
    }
}

impl DispersionMap {
    pub fn validate(&self) -> Result<()> {
        let dl = self.total_ps_per_nm();
        if !(dl.is_finite() && dl != 0.0) {
            return Err(Error::InvalidArgument(format!(
                "total dispersion D·L = {dl} ps/nm must be finite and nonzero"
            )));
        }
        if !(self.fiber_km > 0.0) {
            return Err(Error::InvalidArgument(format!("fiber length {} km must be positive", self.fiber_km)));
        }
        let [lo, hi] = self.band_nm;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidArgument(format!("band [{lo}, {hi}] nm must be positive and increasing")));
        }
        if !(self.reference_nm > 0.0 && self.offset_ns.is_finite()) {
            return Err(Error::InvalidArgument("reference wavelength and offset must be finite".into()));
        }
        Ok(())
    }

    /// D·L in ps/nm.
    pub fn total_ps_per_nm(&self) -> f64 {
        self.dispersion_ps_nm_km * self.fiber_km
    }

    /// Arrival time without the band check.
    pub(crate) fn time_unchecked(&self, nu_thz: f64) -> f64 {
        self.offset_ns + 1e-3 * self.total_ps_per_nm() * (SPEED_OF_LIGHT_NM_THZ / nu_thz - self.reference_nm)
    }

    /// Arrival time in ns of a photon at `nu_thz`.
    pub fn freq_to_arrival_time(&self, nu_thz: f64) -> Result<f64> {
        let lambda = SPEED_OF_LIGHT_NM_THZ / nu_thz;
        let [lo, hi] = self.band_nm;
        if !(nu_thz > 0.0 && lambda >= lo && lambda <= hi) {
            return Err(Error::OutOfBand(format!("{nu_thz} THz ({lambda} nm) outside [{lo}, {hi}] nm")));
        }
        Ok(self.time_unchecked(nu_thz))
    }

    /// Inverse of [`freq_to_arrival_time`](Self::freq_to_arrival_time).
    pub fn invert_time_to_freq(&self, t_ns: f64) -> Result<f64> {
        let lambda = self.reference_nm + 1e3 * (t_ns - self.offset_ns) / self.total_ps_per_nm();
        let [lo, hi] = self.band_nm;
        if !(lambda >= lo && lambda <= hi) {
            return Err(Error::OutOfBand(format!("{t_ns} ns maps to {lambda} nm outside [{lo}, {hi}] nm")));
        }
        Ok(SPEED_OF_LIGHT_NM_THZ / lambda)
    }

    /// Earliest and latest arrival time over the band, ns.
    pub fn time_range(&self) -> (f64, f64) {
        let t = |nm: f64| self.offset_ns + 1e-3 * self.total_ps_per_nm() * (nm - self.reference_nm);
        let (a, b) = (t(self.band_nm[0]), t(self.band_nm[1]));
        (a.min(b), a.max(b))
    }

    /// |dt/dν| at `nu_thz`, ps/THz.
    pub fn time_per_frequency_ps(&self, nu_thz: f64) -> f64 {
        (self.total_ps_per_nm() * SPEED_OF_LIGHT_NM_THZ / (nu_thz * nu_thz)).abs()
    }
}

/// ToA spacing of comb teeth 1/τ apart in Δν, ps.
pub fn toa_tooth_period_ps(map: &DispersionMap, nu_center_thz: f64, tau_ps: f64) -> f64 {
    map.time_per_frequency_ps(nu_center_thz) / tau_ps.abs()
}
