//! Temperature-dependent Sellmeier models loaded from TOML.
//!
//! Each axis evaluates
//! `n² = A + Σ_k B_k / (λ² − C_k²) − D·λ²` with λ in µm, where every
//! coefficient may carry a thermal term `X = value + thermal·f(T)`.
//! `f(T) = (T − T_ref)(T + T_off)` when an offset is given, `T − T_ref`
//! otherwise.
//!
//! File schema:
//!
//! ```toml
//! name = "..."
//! temperature_c = 40.8
//! [thermal]
//! reference_c = 24.5
//! offset_c = 570.82        # optional
//! [[axis]]
//! name = "e"
//! range_nm = [500.0, 4000.0]
//! a = { value = 4.5, thermal = 4.8e-7 }
//! d = { value = 0.02 }     # optional IR term
//!   [[axis.pole]]
//!   strength = { value = 0.08 }
//!   resonance_um = { value = 0.19 }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{Wavelength, SPEED_OF_LIGHT_MM_PS, SPEED_OF_LIGHT_NM_THZ};

/// Step used by the numeric group-velocity route, in THz.
pub const FD_STEP_THZ: f64 = 1e-3;

/// Coefficient set shipped with the crate (MgO-doped stoichiometric LiTaO₃).
pub const MGO_SLT_TOML: &str = include_str!("../../data/mgo_slt.toml");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficient {
    pub value: f64,
    #[serde(default)]
    pub thermal: f64,
}

impl Coefficient {
    fn at(&self, f: f64) -> f64 {
        self.value + self.thermal * f
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pole {
    pub strength: Coefficient,
    pub resonance_um: Coefficient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisCoefficients {
    pub name: String,
    pub range_nm: [f64; 2],
    pub a: Coefficient,
    #[serde(default)]
    pub pole: Vec<Pole>,
    #[serde(default)]
    pub d: Option<Coefficient>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalModel {
    pub reference_c: f64,
    #[serde(default)]
    pub offset_c: Option<f64>,
}

impl ThermalModel {
    fn factor(&self, t: f64) -> f64 {
        match self.offset_c {
            Some(off) => (t - self.reference_c) * (t + off),
            None => t - self.reference_c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellmeierModel {
    pub name: String,
    pub temperature_c: f64,
    #[serde(default)]
    pub thermal: Option<ThermalModel>,
    pub axis: Vec<AxisCoefficients>,
}

/// Anything that can supply n(λ) per polarization axis.
pub trait IndexModel {
    fn index(&self, axis: &str, lambda: Wavelength) -> Result<f64>;

    /// Valid wavelength interval in nm.
    fn valid_range(&self, axis: &str) -> Result<(f64, f64)>;

    /// dn/dλ in 1/µm, if the model can provide it in closed form.
    fn index_slope(&self, _axis: &str, _lambda: Wavelength) -> Option<Result<f64>> {
        None
    }
}

impl SellmeierModel {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let model: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// The shipped MgO:SLT set at its stored operating temperature.
    pub fn mgo_slt() -> Self {
        Self::from_toml_str(MGO_SLT_TOML).expect("shipped Sellmeier data is valid")
    }

    pub fn with_temperature(mut self, celsius: f64) -> Self {
        self.temperature_c = celsius;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.axis.is_empty() {
            return Err(Error::Parse("Sellmeier model has no axes".into()));
        }
        if !self.temperature_c.is_finite() {
            return Err(Error::Parse("temperature_c must be finite".into()));
        }
        for ax in &self.axis {
            let [lo, hi] = ax.range_nm;
            if !(lo > 0.0 && hi > lo) {
                return Err(Error::Parse(format!("axis {}: invalid range_nm [{lo}, {hi}]", ax.name)));
            }
            // n must be real and above 1 across the range
            for k in 0..=64 {
                let nm = lo + (hi - lo) * k as f64 / 64.0;
                let n2 = self.n_squared(ax, nm * 1e-3);
                if !(n2.is_finite() && n2 > 1.0) {
                    return Err(Error::Parse(format!(
                        "axis {}: n² = {n2} at {nm} nm is not real and above 1",
                        ax.name
                    )));
                }
            }
        }
        Ok(())
    }

    fn axis(&self, name: &str) -> Result<&AxisCoefficients> {
        self.axis
            .iter()
            .find(|a| a.name == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown polarization axis '{name}'")))
    }

    fn thermal_factor(&self) -> f64 {
        self.thermal.map_or(0.0, |t| t.factor(self.temperature_c))
    }

    fn n_squared(&self, ax: &AxisCoefficients, um: f64) -> f64 {
        let f = self.thermal_factor();
        let l2 = um * um;
        let mut n2 = ax.a.at(f);
        for p in &ax.pole {
            let c = p.resonance_um.at(f);
            n2 += p.strength.at(f) / (l2 - c * c);
        }
        if let Some(d) = &ax.d {
            n2 -= d.at(f) * l2;
        }
        n2
    }

    /// d(n²)/dλ in 1/µm.
    fn n_squared_slope(&self, ax: &AxisCoefficients, um: f64) -> f64 {
        let f = self.thermal_factor();
        let l2 = um * um;
        let mut s = 0.0;
        for p in &ax.pole {
            let c = p.resonance_um.at(f);
            let den = l2 - c * c;
            s -= p.strength.at(f) * 2.0 * um / (den * den);
        }
        if let Some(d) = &ax.d {
            s -= 2.0 * d.at(f) * um;
        }
        s
    }

    fn check_range(&self, ax: &AxisCoefficients, lambda: Wavelength) -> Result<()> {
        let [lo, hi] = ax.range_nm;
        let nm = lambda.nm();
        if nm < lo || nm > hi {
            return Err(Error::Domain(format!("{nm} nm outside the valid range [{lo}, {hi}] nm of axis {}", ax.name)));
        }
        Ok(())
    }
}

impl IndexModel for SellmeierModel {
    fn index(&self, axis: &str, lambda: Wavelength) -> Result<f64> {
        let ax = self.axis(axis)?;
        self.check_range(ax, lambda)?;
        Ok(self.n_squared(ax, lambda.um()).sqrt())
    }

    fn valid_range(&self, axis: &str) -> Result<(f64, f64)> {
        let [lo, hi] = self.axis(axis)?.range_nm;
        Ok((lo, hi))
    }

    fn index_slope(&self, axis: &str, lambda: Wavelength) -> Option<Result<f64>> {
        Some((|| {
            let ax = self.axis(axis)?;
            self.check_range(ax, lambda)?;
            let um = lambda.um();
            Ok(self.n_squared_slope(ax, um) / (2.0 * self.n_squared(ax, um).sqrt()))
        })())
    }
}

fn check_strictly_inside(model: &impl IndexModel, axis: &str, lambda: Wavelength) -> Result<()> {
    let (lo, hi) = model.valid_range(axis)?;
    let nm = lambda.nm();
    if nm <= lo || nm >= hi {
        return Err(Error::Domain(format!("group velocity needs {nm} nm strictly inside ({lo}, {hi}) nm")));
    }
    Ok(())
}

/// Wavenumber k = 2π·n·ν/c in rad/mm at frequency `nu_thz`.
pub fn wavenumber(model: &impl IndexModel, axis: &str, nu_thz: f64) -> Result<f64> {
    let lambda = Wavelength::new(SPEED_OF_LIGHT_NM_THZ / nu_thz)?;
    let n = model.index(axis, lambda)?;
    Ok(std::f64::consts::TAU * n * nu_thz / SPEED_OF_LIGHT_MM_PS)
}

/// Inverse group velocity dk/dω in ps/mm.
///
/// Uses the model's analytic slope when available (n_g = n − λ·dn/dλ),
/// otherwise [`inv_group_velocity_numeric`].
pub fn inv_group_velocity(model: &impl IndexModel, axis: &str, lambda: Wavelength) -> Result<f64> {
    check_strictly_inside(model, axis, lambda)?;
    match model.index_slope(axis, lambda) {
        Some(slope) => {
            let n = model.index(axis, lambda)?;
            Ok((n - lambda.um() * slope?) / SPEED_OF_LIGHT_MM_PS)
        }
        None => inv_group_velocity_numeric(model, axis, lambda),
    }
}

/// Central difference of k(ν) with step [`FD_STEP_THZ`].
pub fn inv_group_velocity_numeric(model: &impl IndexModel, axis: &str, lambda: Wavelength) -> Result<f64> {
    check_strictly_inside(model, axis, lambda)?;
    let nu = SPEED_OF_LIGHT_NM_THZ / lambda.nm();
    let h = FD_STEP_THZ;
    let kp = wavenumber(model, axis, nu + h)?;
    let km = wavenumber(model, axis, nu - h)?;
    Ok((kp - km) / (2.0 * h) / std::f64::consts::TAU)
}
