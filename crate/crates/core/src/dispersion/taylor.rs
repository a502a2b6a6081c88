use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::SPEED_OF_LIGHT_MM_PS;

use super::Wave;

use std::f64::consts::{PI, TAU};

/// Phase indices at the design point. Only needed when the absolute
/// wave-vector mismatch matters (explicit poling period).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseIndices {
    pub pump: f64,
    pub signal: f64,
    pub idler: f64,
}

/// Second-order expansion of k(ν) around the degenerate point ν₀ (pump
/// expanded around 2ν₀):
/// `k(ν) = k₀ + 2π·V⁻¹·δ + 2π²·β·δ²`, δ = ν − ν_ref.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaylorDispersion {
    pub nu0_thz: f64,
    /// Inverse group velocities in ps/mm.
    pub inv_vg_pump: f64,
    pub inv_vg_signal: f64,
    pub inv_vg_idler: f64,
    /// Group-velocity dispersion in ps²/mm.
    #[serde(default)]
    pub gvd_pump: f64,
    #[serde(default)]
    pub gvd_signal: f64,
    #[serde(default)]
    pub gvd_idler: f64,
    #[serde(default)]
    pub phase_index: Option<PhaseIndices>,
}

impl TaylorDispersion {
    /// First-order model with the given inverse group velocities.
    pub fn first_order(nu0_thz: f64, inv_vg_pump: f64, inv_vg_signal: f64, inv_vg_idler: f64) -> Result<Self> {
        let t = Self {
            nu0_thz,
            inv_vg_pump,
            inv_vg_signal,
            inv_vg_idler,
            gvd_pump: 0.0,
            gvd_signal: 0.0,
            gvd_idler: 0.0,
            phase_index: None,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu0_thz.is_finite() && self.nu0_thz > 0.0) {
            return Err(Error::InvalidArgument(format!("nu0_thz = {} must be positive", self.nu0_thz)));
        }
        for (name, v) in [
            ("inv_vg_pump", self.inv_vg_pump),
            ("inv_vg_signal", self.inv_vg_signal),
            ("inv_vg_idler", self.inv_vg_idler),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} = {v} must be positive")));
            }
        }
        for (name, v) in [("gvd_pump", self.gvd_pump), ("gvd_signal", self.gvd_signal), ("gvd_idler", self.gvd_idler)] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be finite")));
            }
        }
        if let Some(p) = self.phase_index {
            if !(p.pump > 1.0 && p.signal > 1.0 && p.idler > 1.0) {
                return Err(Error::InvalidArgument("phase indices must exceed 1".into()));
            }
        }
        Ok(())
    }

    fn coefficients(&self, wave: Wave) -> (f64, f64, f64) {
        match wave {
            Wave::Pump => (2.0 * self.nu0_thz, self.inv_vg_pump, self.gvd_pump),
            Wave::Signal => (self.nu0_thz, self.inv_vg_signal, self.gvd_signal),
            Wave::Idler => (self.nu0_thz, self.inv_vg_idler, self.gvd_idler),
        }
    }

    /// dk/dω at `nu_thz`, in ps/mm.
    pub fn inv_group_velocity(&self, wave: Wave, nu_thz: f64) -> f64 {
        let (nu_ref, v, beta) = self.coefficients(wave);
        v + TAU * beta * (nu_thz - nu_ref)
    }

    /// k(ν) − k(ν_ref) in rad/mm.
    pub fn wavenumber_shift(&self, wave: Wave, nu_thz: f64) -> f64 {
        let (nu_ref, v, beta) = self.coefficients(wave);
        let d = nu_thz - nu_ref;
        TAU * v * d + 2.0 * PI * PI * beta * d * d
    }

    /// k_p − k_s − k_i at the design point, in rad/mm.
    pub fn reference_mismatch(&self) -> Result<f64> {
        let p = self.phase_index.ok_or_else(|| {
            Error::InvalidArgument("Taylor model needs phase_index for an absolute wave-vector mismatch".into())
        })?;
        let k = |n: f64, nu: f64| TAU * n * nu / SPEED_OF_LIGHT_MM_PS;
        Ok(k(p.pump, 2.0 * self.nu0_thz) - k(p.signal, self.nu0_thz) - k(p.idler, self.nu0_thz))
    }

    /// Δk relative to the design point, computed from detunings so that
    /// exact cancellations survive in floating point.
    pub fn mismatch_variation(&self, nu_s: f64, nu_i: f64) -> f64 {
        let ds = nu_s - self.nu0_thz;
        let di = nu_i - self.nu0_thz;
        let sum = ds + di;
        let first = TAU * ((self.inv_vg_pump - self.inv_vg_signal) * ds + (self.inv_vg_pump - self.inv_vg_idler) * di);
        // grouped so that swapping equal signal/idler terms is bit-exact
        let arms = self.gvd_signal * ds * ds + self.gvd_idler * di * di;
        let second = 2.0 * PI * PI * (self.gvd_pump * sum * sum - arms);
        first + second
    }

    /// Closed-form first-order poling period in µm.
    pub fn closed_form_period_um(&self) -> Result<f64> {
        let dk = self.reference_mismatch()?;
        if dk <= 0.0 {
            return Err(Error::Solver(format!("reference mismatch {dk} rad/mm admits no period")));
        }
        Ok(TAU / dk * 1e3)
    }

    pub fn swapped(&self) -> Self {
        Self {
            inv_vg_signal: self.inv_vg_idler,
            inv_vg_idler: self.inv_vg_signal,
            gvd_signal: self.gvd_idler,
            gvd_idler: self.gvd_signal,
            phase_index: self.phase_index.map(|p| PhaseIndices { signal: p.idler, idler: p.signal, ..p }),
            ..*self
        }
    }
}
