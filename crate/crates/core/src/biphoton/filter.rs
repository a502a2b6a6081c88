//! Spectral filters applied to each arm as intensity transmissions T(λ).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
#[derive(Default)]
pub enum FilterSpec {
    #[default]
    Open,
    /// Logistic edge `T = 1 / (1 + exp(−(λ − cut_on)/edge))`.
    LongPass { cut_on_nm: f64, edge_nm: f64 },
    /// Gaussian apodization in intensity.
    Gaussian { center_nm: f64, fwhm_nm: f64 },
    /// Measured curve, linearly interpolated and held constant outside.
    Tabulated { wavelength_nm: Vec<f64>, transmission: Vec<f64> },
    /// Product of several filters.
    Chain(Vec<FilterSpec>),
}

impl FilterSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            FilterSpec::Open => Ok(()),
            FilterSpec::LongPass { cut_on_nm, edge_nm } => {
                if !(cut_on_nm.is_finite() && *cut_on_nm > 0.0 && edge_nm.is_finite() && *edge_nm > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "long-pass cut-on {cut_on_nm} nm and edge {edge_nm} nm must be positive"
                    )));
                }
                Ok(())
            }
            FilterSpec::Gaussian { center_nm, fwhm_nm } => {
                if !(center_nm.is_finite() && *center_nm > 0.0 && fwhm_nm.is_finite() && *fwhm_nm > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "Gaussian filter center {center_nm} nm and FWHM {fwhm_nm} nm must be positive"
                    )));
                }
                Ok(())
            }
            FilterSpec::Tabulated { wavelength_nm, transmission } => {
                if wavelength_nm.len() != transmission.len() {
                    return Err(Error::LengthMismatch { expected: wavelength_nm.len(), actual: transmission.len() });
                }
                if wavelength_nm.len() < 2 {
                    return Err(Error::InvalidArgument("tabulated filter needs at least 2 samples".into()));
                }
                if !wavelength_nm.windows(2).all(|w| w[1] > w[0]) || !wavelength_nm.iter().all(|x| x.is_finite()) {
                    return Err(Error::InvalidArgument("tabulated wavelengths must be strictly increasing".into()));
                }
                if let Some(t) = transmission.iter().find(|t| !(0.0..=1.0).contains(*t)) {
                    return Err(Error::InvalidArgument(format!("transmission {t} outside [0, 1]")));
                }
                Ok(())
            }
            FilterSpec::Chain(parts) => parts.iter().try_for_each(|p| p.validate()),
        }
    }

    /// Intensity transmission at `nm`.
    pub fn transmission(&self, nm: f64) -> f64 {
        match self {
            FilterSpec::Open => 1.0,
            FilterSpec::LongPass { cut_on_nm, edge_nm } => 1.0 / (1.0 + (-(nm - cut_on_nm) / edge_nm).exp()),
            FilterSpec::Gaussian { center_nm, fwhm_nm } => {
                let x = (nm - center_nm) / fwhm_nm;
                (-4.0 * std::f64::consts::LN_2 * x * x).exp()
            }
            FilterSpec::Tabulated { wavelength_nm: xs, transmission: ts } => {
                let k = xs.partition_point(|&x| x <= nm);
                if k == 0 {
                    ts[0]
                } else if k == xs.len() {
                    ts[xs.len() - 1]
                } else {
                    let t = (nm - xs[k - 1]) / (xs[k] - xs[k - 1]);
                    ts[k - 1] + t * (ts[k] - ts[k - 1])
                }
            }
            FilterSpec::Chain(parts) => parts.iter().map(|p| p.transmission(nm)).product(),
        }
    }

    /// Parse a two-column text file (`λ_nm  T` per line, `#` comments).
    pub fn tabulated_from_str(text: &str) -> Result<Self> {
        let mut wavelength_nm = Vec::new();
        let mut transmission = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> =
                line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
            if cols.len() != 2 {
                return Err(Error::Parse(format!("line {}: expected 2 columns, got {}", lineno + 1, cols.len())));
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)));
            wavelength_nm.push(parse(cols[0])?);
            transmission.push(parse(cols[1])?);
        }
        let f = FilterSpec::Tabulated { wavelength_nm, transmission };
        f.validate()?;
        Ok(f)
    }

    pub fn tabulated_from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::tabulated_from_str(&text)
    }

    /// Replace every long-pass cut-on in this filter.
    pub(crate) fn set_cut_on(&mut self, nm: f64) -> bool {
        match self {
            FilterSpec::LongPass { cut_on_nm, .. } => {
                *cut_on_nm = nm;
                true
            }
            FilterSpec::Chain(parts) => parts.iter_mut().fold(false, |acc, p| p.set_cut_on(nm) | acc),
            _ => false,
        }
    }

    /// Replace every Gaussian width in this filter.
    pub(crate) fn set_gaussian_fwhm(&mut self, nm: f64) -> bool {
        match self {
            FilterSpec::Gaussian { fwhm_nm, .. } => {
                *fwhm_nm = nm;
                true
            }
            FilterSpec::Chain(parts) => parts.iter_mut().fold(false, |acc, p| p.set_gaussian_fwhm(nm) | acc),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logistic_edge_is_half_at_cut_on() {
        let f = FilterSpec::LongPass { cut_on_nm: 1500.0, edge_nm: 5.0 };
        assert!((f.transmission(1500.0) - 0.5).abs() < 1e-15);
        assert!(f.transmission(1600.0) > 0.999_999);
        assert!(f.transmission(1400.0) < 1e-6);
    }

    #[test]
    fn gaussian_half_width() {
        let f = FilterSpec::Gaussian { center_nm: 1584.0, fwhm_nm: 22.0 };
        assert!((f.transmission(1595.0) - 0.5).abs() < 1e-14);
        assert_eq!(f.transmission(1584.0), 1.0);
    }

    #[test]
    fn tabulated_interpolates_and_clamps() {
        let f = FilterSpec::tabulated_from_str("# lambda T\n1500 0.0\n1550, 0.5\n1600 1.0\n").unwrap();
        assert_eq!(f.transmission(1400.0), 0.0);
        assert!((f.transmission(1525.0) - 0.25).abs() < 1e-15);
        assert_eq!(f.transmission(1700.0), 1.0);
    }

    #[test]
    fn tabulated_rejects_bad_samples() {
        assert!(FilterSpec::tabulated_from_str("1500 0.1\n1500 0.2\n").is_err());
        assert!(FilterSpec::tabulated_from_str("1500 0.1\n1510 1.2\n").is_err());
        assert!(FilterSpec::tabulated_from_str("1500 0.1 3\n").is_err());
        assert!(FilterSpec::tabulated_from_str("1500 x\n1510 0.2\n").is_err());
    }

    #[test]
    fn chain_multiplies_and_stays_in_unit_interval() {
        let f = FilterSpec::Chain(vec![
            FilterSpec::LongPass { cut_on_nm: 1570.0, edge_nm: 1.0 },
            FilterSpec::Gaussian { center_nm: 1584.0, fwhm_nm: 30.0 },
        ]);
        for nm in (1500..1700).step_by(7) {
            let t = f.transmission(nm as f64);
            assert!((0.0..=1.0).contains(&t));
        }
        let mut g = f.clone();
        assert!(g.set_cut_on(1575.0));
        assert!(!FilterSpec::Open.set_cut_on(1.0));
    }
}
