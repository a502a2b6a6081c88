//! Physical units used across the crate.
//!
//! Frequencies are ordinary frequencies in THz (not angular), wavelengths are
//! vacuum wavelengths in nm and delays are in ps. Formulas written with
//! angular frequency pick up explicit `2π` factors where they are evaluated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in nm·THz.
pub const SPEED_OF_LIGHT_NM_THZ: f64 = 299_792.458;

/// Speed of light in µm/ps.
pub const SPEED_OF_LIGHT_UM_PS: f64 = 299.792_458;

/// Speed of light in mm/ps.
pub const SPEED_OF_LIGHT_MM_PS: f64 = 0.299_792_458;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Frequency(f64);

impl Frequency {
    pub fn new(thz: f64) -> Result<Self> {
        if !thz.is_finite() {
            return Err(Error::Domain(format!("frequency {thz} THz is not finite")));
        }
        Ok(Self(thz))
    }

    pub fn thz(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Wavelength(f64);

impl Wavelength {
    pub fn new(nm: f64) -> Result<Self> {
        if !(nm.is_finite() && nm > 0.0) {
            return Err(Error::Domain(format!("wavelength {nm} nm must be positive")));
        }
        Ok(Self(nm))
    }

    pub fn nm(self) -> f64 {
        self.0
    }

    pub fn um(self) -> f64 {
        self.0 * 1e-3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct DelayTime(f64);

impl DelayTime {
    pub fn from_ps(ps: f64) -> Result<Self> {
        if !ps.is_finite() {
            return Err(Error::Domain(format!("delay {ps} ps is not finite")));
        }
        Ok(Self(ps))
    }

    pub fn ps(self) -> f64 {
        self.0
    }

    pub fn fs(self) -> f64 {
        self.0 * 1e3
    }

    /// Optical path length corresponding to this delay, in µm.
    pub fn to_position_um(self) -> f64 {
        self.0 * SPEED_OF_LIGHT_UM_PS
    }
}

/// ν = c/λ.
pub fn wavelength_to_frequency(lambda: Wavelength) -> Frequency {
    Frequency(SPEED_OF_LIGHT_NM_THZ / lambda.nm())
}

/// λ = c/ν; fails for non-positive frequencies.
pub fn frequency_to_wavelength(nu: Frequency) -> Result<Wavelength> {
    if nu.thz() <= 0.0 {
        return Err(Error::Domain(format!("frequency {} THz has no vacuum wavelength", nu.thz())));
    }
    Wavelength::new(SPEED_OF_LIGHT_NM_THZ / nu.thz())
}

/// Convenience for callers holding raw nm values.
pub fn nm_to_thz(nm: f64) -> Result<f64> {
    Ok(wavelength_to_frequency(Wavelength::new(nm)?).thz())
}

pub fn thz_to_nm(thz: f64) -> Result<f64> {
    Ok(frequency_to_wavelength(Frequency::new(thz)?)?.nm())
}

/// Delay-stage displacement to delay time, τ = d/c (single pass).
pub fn delay_position_to_time(position_um: f64) -> Result<DelayTime> {
    if !position_um.is_finite() {
        return Err(Error::Domain(format!("delay position {position_um} µm is not finite")));
    }
    DelayTime::from_ps(position_um / SPEED_OF_LIGHT_UM_PS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn carrier_frequency_of_1584_nm() {
        let nu = wavelength_to_frequency(Wavelength::new(1584.0).unwrap());
        // 299792.458 / 1584
        assert_relative_eq!(nu.thz(), 189.262_915_404_040_4, max_relative = 1e-15);
    }

    #[test]
    fn half_wavelength_doubles_frequency() {
        let a = wavelength_to_frequency(Wavelength::new(792.0).unwrap()).thz();
        let b = wavelength_to_frequency(Wavelength::new(1584.0).unwrap()).thz();
        assert_relative_eq!(a, 2.0 * b, max_relative = 1e-15);
    }

    #[test]
    fn speed_of_light_wavelength_is_one_thz() {
        let nu = wavelength_to_frequency(Wavelength::new(SPEED_OF_LIGHT_NM_THZ).unwrap());
        assert_eq!(nu.thz(), 1.0);
    }

    #[test]
    fn non_positive_wavelength_rejected() {
        assert!(matches!(Wavelength::new(0.0), Err(Error::Domain(_))));
        assert!(matches!(Wavelength::new(-3.0), Err(Error::Domain(_))));
        assert!(nm_to_thz(f64::NAN).is_err());
    }

    #[test]
    fn delay_positions_from_stage_readings() {
        let t = delay_position_to_time(600.0).unwrap();
        assert_relative_eq!(t.ps(), 2.001_384_6, epsilon = 1e-6);
        assert!((t.ps() - 2.0).abs() < 0.01);
        assert_eq!(delay_position_to_time(0.0).unwrap().ps(), 0.0);
        let fwhm = delay_position_to_time(52.9).unwrap();
        assert_relative_eq!(fwhm.fs(), 176.455, epsilon = 1e-3);
        assert!((fwhm.fs() - 176.3).abs() < 0.2);
        assert_relative_eq!(fwhm.to_position_um(), 52.9, max_relative = 1e-14);
    }

    #[test]
    fn wavelength_round_trip() {
        for nm in [400.0, 792.0, 1584.0, 1610.3, 4000.0] {
            let back = thz_to_nm(nm_to_thz(nm).unwrap()).unwrap();
            assert_relative_eq!(back, nm, max_relative = 1e-12);
        }
    }
}
