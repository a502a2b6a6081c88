use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{Wavelength, SPEED_OF_LIGHT_NM_THZ};

use super::sellmeier::{inv_group_velocity, wavenumber, IndexModel, SellmeierModel};
use super::taylor::TaylorDispersion;
use super::Wave;

use std::f64::consts::TAU;

/// Sellmeier backend: which crystal axis each wave is polarized along.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellmeierCrystal {
    pub model: SellmeierModel,
    pub pump_axis: String,
    pub signal_axis: String,
    pub idler_axis: String,
    /// Degenerate signal wavelength used as the design point, in nm.
    pub degenerate_nm: f64,
}

impl SellmeierCrystal {
    fn axis(&self, wave: Wave) -> &str {
        match wave {
            Wave::Pump => &self.pump_axis,
            Wave::Signal => &self.signal_axis,
            Wave::Idler => &self.idler_axis,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dispersion {
    Sellmeier(SellmeierCrystal),
    Taylor(TaylorDispersion),
}

impl Dispersion {
    /// Degenerate signal frequency of the design point.
    pub fn reference_frequency(&self) -> f64 {
        match self {
            Dispersion::Sellmeier(s) => SPEED_OF_LIGHT_NM_THZ / s.degenerate_nm,
            Dispersion::Taylor(t) => t.nu0_thz,
        }
    }

    /// k_p(ν_s + ν_i) − k_s(ν_s) − k_i(ν_i), without any grating term.
    pub fn bare_mismatch(&self, nu_s: f64, nu_i: f64) -> Result<f64> {
        match self {
            Dispersion::Sellmeier(s) => Ok(wavenumber(&s.model, &s.pump_axis, nu_s + nu_i)?
                - wavenumber(&s.model, &s.signal_axis, nu_s)?
                - wavenumber(&s.model, &s.idler_axis, nu_i)?),
            Dispersion::Taylor(t) => Ok(t.reference_mismatch()? + t.mismatch_variation(nu_s, nu_i)),
        }
    }

    /// Bare mismatch minus its value at the design point.
    pub fn mismatch_variation(&self, nu_s: f64, nu_i: f64) -> Result<f64> {
        match self {
            Dispersion::Sellmeier(_) => {
                let nu0 = self.reference_frequency();
                Ok(self.bare_mismatch(nu_s, nu_i)? - self.bare_mismatch(nu0, nu0)?)
            }
            Dispersion::Taylor(t) => Ok(t.mismatch_variation(nu_s, nu_i)),
        }
    }

    /// dk/dω of `wave` at `nu_thz`, in ps/mm.
    pub fn inv_group_velocity(&self, wave: Wave, nu_thz: f64) -> Result<f64> {
        match self {
            Dispersion::Sellmeier(s) => {
                let lambda = Wavelength::new(SPEED_OF_LIGHT_NM_THZ / nu_thz)?;
                inv_group_velocity(&s.model, s.axis(wave), lambda)
            }
            Dispersion::Taylor(t) => Ok(t.inv_group_velocity(wave, nu_thz)),
        }
    }

    /// Signal minus idler inverse group velocity at the design point.
    pub fn group_velocity_mismatch(&self) -> Result<f64> {
        let nu0 = self.reference_frequency();
        Ok(self.inv_group_velocity(Wave::Signal, nu0)? - self.inv_group_velocity(Wave::Idler, nu0)?)
    }

    /// Same crystal with signal and idler roles exchanged.
    pub fn swapped(&self) -> Self {
        match self {
            Dispersion::Sellmeier(s) => Dispersion::Sellmeier(SellmeierCrystal {
                signal_axis: s.idler_axis.clone(),
                idler_axis: s.signal_axis.clone(),
                ..s.clone()
            }),
            Dispersion::Taylor(t) => Dispersion::Taylor(t.swapped()),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Dispersion::Taylor(t) => t.validate(),
            Dispersion::Sellmeier(s) => {
                let nm = s.degenerate_nm;
                let pump = Wavelength::new(nm / 2.0)?;
                let sig = Wavelength::new(nm)?;
                s.model.index(&s.pump_axis, pump)?;
                s.model.index(&s.signal_axis, sig)?;
                s.model.index(&s.idler_axis, sig)?;
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Poling {
    /// Explicit grating period.
    Period { period_um: f64 },
    /// Grating chosen to cancel the design-point mismatch up to a residual
    /// detuning Δk₀ (rad/mm).
    Matched { detuning_rad_per_mm: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSpec {
    pub length_mm: f64,
    pub poling: Poling,
    pub dispersion: Dispersion,
}

impl CrystalSpec {
    pub fn new(length_mm: f64, poling: Poling, dispersion: Dispersion) -> Result<Self> {
        let spec = Self { length_mm, poling, dispersion };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length_mm.is_finite() && self.length_mm > 0.0) {
            return Err(Error::InvalidArgument(format!("crystal length {} mm must be positive", self.length_mm)));
        }
        match self.poling {
            Poling::Period { period_um } if !(period_um.is_finite() && period_um > 0.0) => {
                return Err(Error::InvalidArgument(format!("poling period {period_um} µm must be positive")));
            }
            Poling::Matched { detuning_rad_per_mm } if !detuning_rad_per_mm.is_finite() => {
                return Err(Error::InvalidArgument("poling detuning must be finite".into()));
            }
            _ => {}
        }
        self.dispersion.validate()
    }

    /// Grating period in µm, when it is defined.
    pub fn period_um(&self) -> Result<f64> {
        match self.poling {
            Poling::Period { period_um } => Ok(period_um),
            Poling::Matched { detuning_rad_per_mm } => {
                let nu0 = self.dispersion.reference_frequency();
                let k_grating = self.dispersion.bare_mismatch(nu0, nu0)? - detuning_rad_per_mm;
                Ok(TAU / k_grating * 1e3)
            }
        }
    }

    /// Δk = k_p(ν_s+ν_i) − k_s(ν_s) − k_i(ν_i) − 2π/Λ in rad/mm.
    pub fn phase_mismatch(&self, nu_s: f64, nu_i: f64) -> Result<f64> {
        if !(nu_s.is_finite() && nu_i.is_finite()) {
            return Err(Error::Domain("phase mismatch needs finite frequencies".into()));
        }
        match self.poling {
            Poling::Matched { detuning_rad_per_mm } => {
                Ok(detuning_rad_per_mm + self.dispersion.mismatch_variation(nu_s, nu_i)?)
            }
            Poling::Period { period_um } => Ok(self.dispersion.bare_mismatch(nu_s, nu_i)? - TAU / (period_um * 1e-3)),
        }
    }

    pub fn swapped(&self) -> Self {
        Self { dispersion: self.dispersion.swapped(), ..self.clone() }
    }
}

/// Poling period (µm) that zeroes Δk at degeneracy, found by bisection of
/// `Λ ↦ Δk_bare − 2π/Λ` on [0.5, 1000] µm.
pub fn solve_poling_period(dispersion: &Dispersion, pump_nm: f64, degenerate_nm: f64) -> Result<f64> {
    Wavelength::new(pump_nm)?;
    Wavelength::new(degenerate_nm)?;
    let ratio = degenerate_nm / (2.0 * pump_nm);
    if (ratio - 1.0).abs() > 1e-3 {
        return Err(Error::InvalidArgument(format!(
            "degenerate wavelength {degenerate_nm} nm is not twice the pump {pump_nm} nm"
        )));
    }
    let nu = SPEED_OF_LIGHT_NM_THZ / degenerate_nm;
    let bare = dispersion.bare_mismatch(nu, nu)?;
    let g = |period_um: f64| bare - TAU / (period_um * 1e-3);

    let (mut lo, mut hi) = (0.5, 1000.0);
    if g(lo) * g(hi) > 0.0 {
        return Err(Error::Solver(format!(
            "no sign change of the mismatch on [{lo}, {hi}] µm (bare mismatch {bare} rad/mm)"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::taylor::PhaseIndices;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sellmeier() -> Dispersion {
        Dispersion::Sellmeier(SellmeierCrystal {
            model: SellmeierModel::mgo_slt(),
            pump_axis: "o".into(),
            signal_axis: "e".into(),
            idler_axis: "o".into(),
            degenerate_nm: 1584.0,
        })
    }

    fn taylor(vs: f64, vi: f64) -> TaylorDispersion {
        let mut t = TaylorDispersion::first_order(SPEED_OF_LIGHT_NM_THZ / 1584.0, 7.205, vs, vi).unwrap();
        t.phase_index = Some(PhaseIndices { pump: 2.149432, signal: 2.111895, idler: 2.113052 });
        t
    }

    fn nu0() -> f64 {
        SPEED_OF_LIGHT_NM_THZ / 1584.0
    }

    #[test]
    fn shipped_set_reproduces_period() {
        let p = solve_poling_period(&sellmeier(), 792.0, 1584.0).unwrap();
        // independent NumPy evaluation: 21.429539360 µm
        assert_relative_eq!(p, 21.429_539_360, epsilon = 1e-6);
        assert!((p - 21.5).abs() <= 1.0);
    }

    #[test]
    fn solved_period_zeroes_mismatch() {
        let d = sellmeier();
        let p = solve_poling_period(&d, 792.0, 1584.0).unwrap();
        let c = CrystalSpec::new(40.0, Poling::Period { period_um: p }, d).unwrap();
        assert!(c.phase_mismatch(nu0(), nu0()).unwrap().abs() < 1e-9);
    }

    #[test]
    fn taylor_solver_matches_closed_form() {
        let t = taylor(7.195, 7.195);
        let solved = solve_poling_period(&Dispersion::Taylor(t), 792.0, 1584.0).unwrap();
        let exact = t.closed_form_period_um().unwrap();
        assert!((solved - exact).abs() < 1e-10, "{solved} vs {exact}");
    }

    #[test]
    fn solver_reports_missing_bracket() {
        let mut t = taylor(7.195, 7.195);
        t.phase_index = Some(PhaseIndices { pump: 2.0, signal: 2.0, idler: 2.0 });
        assert!(matches!(solve_poling_period(&Dispersion::Taylor(t), 792.0, 1584.0), Err(Error::Solver(_))));
        assert!(matches!(solve_poling_period(&sellmeier(), 780.0, 1584.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn matched_poling_period_matches_solver() {
        let d = sellmeier();
        let c = CrystalSpec::new(40.0, Poling::Matched { detuning_rad_per_mm: 0.0 }, d.clone()).unwrap();
        assert_relative_eq!(
            c.period_um().unwrap(),
            solve_poling_period(&d, 792.0, 1584.0).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn gvm_taylor_depends_on_sum_only() {
        let c = CrystalSpec::new(
            40.0,
            Poling::Matched { detuning_rad_per_mm: 0.0 },
            Dispersion::Taylor(taylor(7.195, 7.195)),
        )
        .unwrap();
        let a = c.phase_mismatch(nu0() + 0.3, nu0() - 0.1).unwrap();
        let b = c.phase_mismatch(nu0() - 0.2, nu0() + 0.4).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn gvm_anti_diagonal_is_exactly_phase_matched() {
        let c = CrystalSpec::new(
            40.0,
            Poling::Matched { detuning_rad_per_mm: 0.0 },
            Dispersion::Taylor(taylor(7.195, 7.195)),
        )
        .unwrap();
        let g = crate::grid::FreqGrid1D::around_wavelength(1584.0, 40.0, 1024).unwrap();
        let worst = (0..g.len())
            .map(|i| c.phase_mismatch(g.value(i), g.value(g.len() - 1 - i)).unwrap().abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn explicit_period_keeps_gvm_structure() {
        let t = taylor(7.195, 7.195);
        let period = t.closed_form_period_um().unwrap();
        let c = CrystalSpec::new(40.0, Poling::Period { period_um: period }, Dispersion::Taylor(t)).unwrap();
        assert!(c.phase_mismatch(nu0() + 0.7, nu0() - 0.7).unwrap().abs() < 1e-9);
    }

    #[test]
    fn finite_on_default_grid() {
        let c = CrystalSpec::new(40.0, Poling::Matched { detuning_rad_per_mm: 0.0 }, sellmeier()).unwrap();
        let g = crate::grid::FreqGrid1D::around_wavelength(1584.0, 40.0, 64).unwrap();
        for i in 0..g.len() {
            for j in 0..g.len() {
                assert!(c.phase_mismatch(g.value(i), g.value(j)).unwrap().is_finite());
            }
        }
    }

    #[test]
    fn group_velocity_mismatch_of_shipped_set() {
        let gvm = sellmeier().group_velocity_mismatch().unwrap().abs();
        assert_relative_eq!(gvm, 0.007_636_806, epsilon = 1e-8);
    }

    #[test]
    fn invalid_specs_rejected() {
        let d = Dispersion::Taylor(taylor(7.195, 7.195));
        assert!(CrystalSpec::new(0.0, Poling::Matched { detuning_rad_per_mm: 0.0 }, d.clone()).is_err());
        assert!(CrystalSpec::new(40.0, Poling::Period { period_um: -2.0 }, d).is_err());
    }

    proptest! {
        #[test]
        fn swap_exchanges_arguments(a in -3.0f64..3.0, b in -3.0f64..3.0, sellmeier_backend in any::<bool>()) {
            let mut t = taylor(7.19, 7.21);
            t.gvd_signal = 3e-4;
            t.gvd_idler = 6e-4;
            t.gvd_pump = 1e-4;
            let d = if sellmeier_backend { sellmeier() } else { Dispersion::Taylor(t) };
            let c = CrystalSpec::new(40.0, Poling::Period { period_um: 21.4 }, d).unwrap();
            let s = c.swapped();
            let lhs = s.phase_mismatch(nu0() + a, nu0() + b).unwrap();
            let rhs = c.phase_mismatch(nu0() + b, nu0() + a).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }
    }
}
