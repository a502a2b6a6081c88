use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::CrystalSpec;
use crate::error::{Error, Result};
use crate::grid::{FreqGrid1D, Grid2D};
use crate::quad::{count_crossings, integrate_2d, outer_crossings, trapezoid};
use crate::units::SPEED_OF_LIGHT_NM_THZ;

use super::filter::FilterSpec;
use super::pump::PumpSpec;

/// Largest tolerated fraction of |f|² within two samples of the grid edge.
pub const TRUNCATION_LIMIT: f64 = 1e-4;

/// sin(x)/x with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// sinc(Δk·L/2), real.
pub fn phase_matching_amplitude(crystal: &CrystalSpec, nu_s: f64, nu_i: f64) -> Result<f64> {
    Ok(sinc(0.5 * crystal.phase_mismatch(nu_s, nu_i)? * crystal.length_mm))
}

/// Joint spectral amplitude f(ν_s, ν_i); rows index the signal axis.
#[derive(Debug, Clone, PartialEq)]
pub struct JsaGrid {
    grid: Grid2D<Complex64>,
    normalized: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    Signal,
    Idler,
}

impl JsaGrid {
    /// Wrap an amplitude grid without touching its normalization.
    pub fn from_grid(grid: Grid2D<Complex64>) -> Result<Self> {
        if grid.values().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Domain("JSA contains non-finite amplitudes".into()));
        }
        Ok(Self { grid, normalized: false })
    }

    pub fn from_real(grid: Grid2D<f64>) -> Result<Self> {
        Self::from_grid(grid.map(|&v| Complex64::new(v, 0.0)))
    }

    /// ∫∫|f|² by the trapezoid rule.
    pub fn norm_squared(&self) -> f64 {
        integrate_2d(&self.grid.map(|z| z.norm_sqr()))
    }

    /// Scale to unit L2 norm.
    pub fn normalized(mut self) -> Result<Self> {
        let n2 = self.norm_squared();
        if !(n2 > 0.0) {
            return Err(Error::ZeroMass);
        }
        let s = 1.0 / n2.sqrt();
        self.grid = self.grid.map(|z| z * s);
        self.normalized = true;
        Ok(self)
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn grid(&self) -> &Grid2D<Complex64> {
        &self.grid
    }

    pub fn axis(&self, arm: Arm) -> &FreqGrid1D {
        match arm {
            Arm::Signal => self.grid.axis1(),
            Arm::Idler => self.grid.axis2(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.grid.values().iter().all(|z| z.im == 0.0)
    }

    /// Real parts, if every imaginary part is exactly zero.
    pub fn real_values(&self) -> Option<Vec<f64>> {
        self.is_real().then(|| self.grid.values().iter().map(|z| z.re).collect())
    }

    pub fn is_square(&self) -> bool {
        self.grid.is_square()
    }

    /// Fraction of the L2 mass lying within two samples of any grid edge.
    pub fn edge_mass_fraction(&self) -> f64 {
        let (n1, n2) = self.grid.dims();
        let near = |i: usize, n: usize| i < 2 || i + 2 >= n;
        let mut edge = 0.0;
        let mut total = 0.0;
        for i in 0..n1 {
            for (j, z) in self.grid.row(i).iter().enumerate() {
                let m = z.norm_sqr();
                total += m;
                if near(i, n1) || near(j, n2) {
                    edge += m;
                }
            }
        }
        if total > 0.0 {
            edge / total
        } else {
            0.0
        }
    }
}

/// f = α(ν_s+ν_i)·sinc(Δk·L/2)·√(T_s T_i) on `axis × axis`, unnormalized.
pub fn assemble_jsa_raw(
    pump: &PumpSpec,
    crystal: &CrystalSpec,
    filter_signal: &FilterSpec,
    filter_idler: &FilterSpec,
    axis: FreqGrid1D,
) -> Result<JsaGrid> {
    pump.validate()?;
    crystal.validate()?;
    filter_signal.validate()?;
    filter_idler.validate()?;
    let n = axis.len();
    let amp_filter = |f: &FilterSpec| -> Vec<f64> {
        (0..n).map(|i| f.transmission(SPEED_OF_LIGHT_NM_THZ / axis.value(i)).sqrt()).collect()
    };
    let ts = amp_filter(filter_signal);
    let ti = amp_filter(filter_idler);
    // pump detuning of ν_s+ν_i depends only on i+j
    let pump_detuning = 2.0 * axis.center() - pump.center_thz();
    let alpha: Vec<f64> = (0..2 * n - 1)
        .map(|k| pump.envelope_at_detuning(pump_detuning + (k as f64 - (n - 1) as f64) * axis.spacing()))
        .collect();
    let grid = Grid2D::try_from_fn(axis, axis, |i, j| {
        let phi = phase_matching_amplitude(crystal, axis.value(i), axis.value(j))?;
        Ok(Complex64::new(alpha[i + j] * phi * (ts[i] * ti[j]), 0.0))
    })?;
    JsaGrid::from_grid(grid)
}

/// Normalized JSA with the support-truncation check.
pub fn assemble_jsa(
    pump: &PumpSpec,
    crystal: &CrystalSpec,
    filter_signal: &FilterSpec,
    filter_idler: &FilterSpec,
    axis: FreqGrid1D,
) -> Result<JsaGrid> {
    let raw = assemble_jsa_raw(pump, crystal, filter_signal, filter_idler, axis)?;
    let fraction = raw.edge_mass_fraction();
    if fraction > TRUNCATION_LIMIT {
        return Err(Error::SupportTruncated { fraction });
    }
    raw.normalized()
}

/// Single-photon spectrum of one arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marginal {
    pub frequency_thz: Vec<f64>,
    pub intensity: Vec<f64>,
    pub fwhm_thz: Option<f64>,
    pub fwhm_nm: Option<f64>,
    /// Wavelength of the midpoint between the half-maximum crossings.
    pub center_nm: Option<f64>,
    /// More than two half-maximum crossings; the widest pair is reported.
    pub multimodal: bool,
}

/// S(ν) = ∫|f|² dν_other.
pub fn marginal_spectrum(jsa: &JsaGrid, arm: Arm) -> Marginal {
    let g = jsa.grid();
    let (n1, n2) = g.dims();
    let intensity: Vec<f64> = match arm {
        Arm::Signal => (0..n1)
            .map(|i| {
                let row: Vec<f64> = g.row(i).iter().map(|z| z.norm_sqr()).collect();
                trapezoid(&row, g.axis2().spacing())
            })
            .collect(),
        Arm::Idler => (0..n2)
            .map(|j| {
                let col: Vec<f64> = (0..n1).map(|i| g.get(i, j).norm_sqr()).collect();
                trapezoid(&col, g.axis1().spacing())
            })
            .collect(),
    };
    let axis = *jsa.axis(arm);
    let peak = intensity.iter().cloned().fold(0.0, f64::max);
    let crossings = (peak > 0.0).then(|| outer_crossings(&intensity, 0.5 * peak, |i| axis.offset(i))).flatten();
    let (fwhm_thz, fwhm_nm, center_nm) = match crossings {
        Some((a, b)) => {
            let (lo, hi) = (axis.center() + a, axis.center() + b);
            (
                Some(b - a),
                Some(SPEED_OF_LIGHT_NM_THZ / lo - SPEED_OF_LIGHT_NM_THZ / hi),
                Some(SPEED_OF_LIGHT_NM_THZ / (axis.center() + 0.5 * (a + b))),
            )
        }
        None => (None, None, None),
    };
    Marginal {
        frequency_thz: axis.values(),
        multimodal: count_crossings(&intensity, 0.5 * peak) > 2,
        intensity,
        fwhm_thz,
        fwhm_nm,
        center_nm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{Dispersion, Poling, TaylorDispersion};

    fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let r = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        f(0.5 * (a + b))
    }

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(std::f64::consts::PI).abs() < 1e-15);
        assert!((sinc(1e-5) - (1e-5f64).sin() / 1e-5).abs() < 1e-15);
        let lobe = golden_max(|x| sinc(x).abs(), std::f64::consts::PI, 2.0 * std::f64::consts::PI);
        assert!((lobe - 0.217_233_628).abs() < 1e-8, "{lobe}");
    }

    fn crystal(detuning: f64) -> CrystalSpec {
        let t = TaylorDispersion::first_order(SPEED_OF_LIGHT_NM_THZ / 1584.0, 7.205, 7.195, 7.195).unwrap();
        CrystalSpec::new(40.0, Poling::Matched { detuning_rad_per_mm: detuning }, Dispersion::Taylor(t)).unwrap()
    }

    #[test]
    fn phase_matching_zero_and_first_null() {
        let c = crystal(0.0);
        let nu0 = SPEED_OF_LIGHT_NM_THZ / 1584.0;
        assert_eq!(phase_matching_amplitude(&c, nu0, nu0).unwrap(), 1.0);
        // Δk·L/2 = π
        let c = crystal(2.0 * std::f64::consts::PI / 40.0);
        assert!(phase_matching_amplitude(&c, nu0, nu0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn truncation_detected() {
        let axis = FreqGrid1D::around_wavelength(1584.0, 5.0, 128).unwrap();
        let r = assemble_jsa(&PumpSpec::default(), &crystal(0.0), &FilterSpec::Open, &FilterSpec::Open, axis);
        assert!(matches!(r, Err(Error::SupportTruncated { .. })));
    }

    #[test]
    fn zero_mass_rejected() {
        let a = FreqGrid1D::new(190.0, 1.0, 4).unwrap();
        let g = JsaGrid::from_real(Grid2D::from_fn(a, a, |_, _| 0.0)).unwrap();
        assert!(matches!(g.normalized(), Err(Error::ZeroMass)));
    }
}
