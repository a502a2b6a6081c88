//! Run configuration: JSON schema, defaults, presets and validation.

use std::path::{Path, PathBuf};

use qcomb_core::biphoton::{
    calibrate_marginal_fwhm, figure_source, ideal_source, unfiltered_source, Calibration, FilterSpec, JsaGrid,
    PumpSpec, SourceSpec,
};
use qcomb_core::dispersion::CrystalSpec;
use qcomb_core::spectrometer::{check_gate, Channel, UniformBins, TRIGGER_PERIOD_NS};
use qcomb_core::units::SPEED_OF_LIGHT_UM_PS;
use qcomb_core::FreqGrid1D;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_center_nm")]
    pub center_nm: f64,
    #[serde(default = "default_half_span_nm")]
    pub half_span_nm: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_center_nm() -> f64 {
    1584.0
}
fn default_half_span_nm() -> f64 {
    40.0
}
fn default_points() -> usize {
    1024
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { center_nm: default_center_nm(), half_span_nm: default_half_span_nm(), points: default_points() }
    }
}

impl GridSpec {
    pub fn axis(&self) -> qcomb_core::Result<FreqGrid1D> {
        FreqGrid1D::around_wavelength(self.center_nm, self.half_span_nm, self.points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayUnit {
    /// Delay-stage displacement, τ = d/c.
    Um,
    Ps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelayList {
    #[serde(default = "default_unit")]
    pub unit: DelayUnit,
    pub values: Vec<f64>,
}

fn default_unit() -> DelayUnit {
    DelayUnit::Um
}

impl Default for DelayList {
    fn default() -> Self {
        Self { unit: DelayUnit::Um, values: vec![0.0, 40.0, 160.0, 320.0, 600.0, 2100.0] }
    }
}

/// One delay as given in the configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delay {
    pub value: f64,
    pub unit: DelayUnit,
}

impl Delay {
    pub fn ps(&self) -> f64 {
        match self.unit {
            DelayUnit::Ps => self.value,
            DelayUnit::Um => self.value / SPEED_OF_LIGHT_UM_PS,
        }
    }

    /// File-name tag such as `40um` or `0.53ps`.
    pub fn label(&self) -> String {
        let unit = match self.unit {
            DelayUnit::Um => "um",
            DelayUnit::Ps => "ps",
        };
        format!("{}{unit}", self.value)
    }

    /// Parses `40um`, `0.53ps`, or a bare number in `default_unit`.
    pub fn parse(text: &str, default_unit: DelayUnit) -> Result<Self, String> {
        let t = text.trim();
        let (num, unit) = if let Some(v) = t.strip_suffix("um") {
            (v, DelayUnit::Um)
        } else if let Some(v) = t.strip_suffix("ps") {
            (v, DelayUnit::Ps)
        } else {
            (t, default_unit)
        };
        let value: f64 = num.trim().parse().map_err(|_| format!("'{text}' is not a delay (e.g. 40um or 0.53ps)"))?;
        if !value.is_finite() {
            return Err(format!("delay '{text}' is not finite"));
        }
        Ok(Self { value, unit })
    }
}

impl DelayList {
    pub fn delays(&self) -> Vec<Delay> {
        self.values.iter().map(|&value| Delay { value, unit: self.unit }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DipSpec {
    #[serde(default = "default_dip_start")]
    pub start_ps: f64,
    #[serde(default = "default_dip_stop")]
    pub stop_ps: f64,
    #[serde(default = "default_dip_points")]
    pub points: usize,
    /// Constant added to P(τ) to mimic accidental coincidences.
    #[serde(default)]
    pub accidental_floor: f64,
}

fn default_dip_start() -> f64 {
    -1.0
}
fn default_dip_stop() -> f64 {
    1.0
}
fn default_dip_points() -> usize {
    201
}

impl Default for DipSpec {
    fn default() -> Self {
        Self {
            start_ps: default_dip_start(),
            stop_ps: default_dip_stop(),
            points: default_dip_points(),
            accidental_floor: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrometerSpec {
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default)]
    pub channels: [Channel; 2],
    #[serde(default = "default_period")]
    pub trigger_period_ns: f64,
    /// Grid samples per reconstructed-CSI bin along each axis.
    #[serde(default = "default_bin_factor")]
    pub csi_bin_factor: usize,
    #[serde(default = "default_toa_bin")]
    pub toa_bin_ps: f64,
    #[serde(default = "default_toa_range")]
    pub toa_half_range_ps: f64,
    /// Bin width of the single-channel arrival histogram.
    #[serde(default = "default_toa_bin")]
    pub arrival_bin_ps: f64,
}

fn default_pairs() -> usize {
    1_000_000
}
fn default_period() -> f64 {
    TRIGGER_PERIOD_NS
}
fn default_bin_factor() -> usize {
    8
}
fn default_toa_bin() -> f64 {
    20.0
}
fn default_toa_range() -> f64 {
    10_000.0
}

impl Default for SpectrometerSpec {
    fn default() -> Self {
        Self {
            pairs: default_pairs(),
            channels: Default::default(),
            trigger_period_ns: default_period(),
            csi_bin_factor: default_bin_factor(),
            toa_bin_ps: default_toa_bin(),
            toa_half_range_ps: default_toa_range(),
            arrival_bin_ps: default_toa_bin(),
        }
    }
}

impl SpectrometerSpec {
    pub fn toa_bins(&self) -> qcomb_core::Result<UniformBins> {
        UniformBins::centered(self.toa_bin_ps, self.toa_half_range_ps)
    }

    /// One gate period in ps.
    pub fn arrival_bins(&self) -> qcomb_core::Result<UniformBins> {
        let period_ps = 1e3 * self.trigger_period_ns;
        UniformBins::new(0.0, self.arrival_bin_ps, (period_ps / self.arrival_bin_ps).ceil() as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub pump: PumpSpec,
    pub crystal: CrystalSpec,
    #[serde(default)]
    pub filter_signal: FilterSpec,
    #[serde(default)]
    pub filter_idler: FilterSpec,
    /// Adjusts one source parameter to hit a marginal width before any run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<Calibration>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub delays: DelayList,
    #[serde(default)]
    pub dip: DipSpec,
    #[serde(default)]
    pub spectrometer: SpectrometerSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Output directory; not part of the configuration hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Long-pass filtered source with a 22 nm marginal.
    Figure,
    /// Same crystal with stronger GVD and no filters (35 nm).
    Unfiltered,
    /// Group-velocity-mismatched crystal with Gaussian apodization.
    Ideal,
}

impl RunConfig {
    pub fn from_source(source: SourceSpec) -> Self {
        Self {
            pump: source.pump,
            crystal: source.crystal,
            filter_signal: source.filter_signal,
            filter_idler: source.filter_idler,
            calibration: None,
            grid: GridSpec::default(),
            delays: DelayList::default(),
            dip: DipSpec::default(),
            spectrometer: SpectrometerSpec::default(),
            seed: Some(1),
            out: None,
        }
    }

    pub fn preset(p: Preset) -> Self {
        Self::from_source(match p {
            Preset::Figure => figure_source(),
            Preset::Unfiltered => unfiltered_source(),
            Preset::Ideal => ideal_source(),
        })
    }

    /// Parses JSON; errors name the offending field path.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                CliError::Validation(inner.to_string())
            } else {
                CliError::Validation(format!("{path}: {inner}"))
            }
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn source(&self) -> SourceSpec {
        SourceSpec {
            pump: self.pump,
            crystal: self.crystal.clone(),
            filter_signal: self.filter_signal.clone(),
            filter_idler: self.filter_idler.clone(),
        }
    }

    /// Checks every nested invariant, prefixing messages with the field path.
    pub fn validate(&self) -> Result<(), CliError> {
        fn at(path: &str, r: qcomb_core::Result<()>) -> Result<(), CliError> {
            r.map_err(|e| CliError::Validation(format!("{path}: {e}")))
        }
        at("pump", self.pump.validate())?;
        at("crystal", self.crystal.validate())?;
        at("filter_signal", self.filter_signal.validate())?;
        at("filter_idler", self.filter_idler.validate())?;
        at("grid", self.grid.axis().map(|_| ()))?;
        if self.grid.points < 16 {
            return Err(CliError::Validation(format!("grid.points: {} is below the minimum of 16", self.grid.points)));
        }
        if self.delays.values.is_empty() {
            return Err(CliError::Validation("delays.values: list is empty".into()));
        }
        if let Some(v) = self.delays.values.iter().find(|v| !v.is_finite()) {
            return Err(CliError::Validation(format!("delays.values: {v} is not finite")));
        }
        let d = &self.dip;
        if d.points < 5 || !(d.stop_ps > d.start_ps) {
            return Err(CliError::Validation(format!(
                "dip: need at least 5 points over an increasing range, got {} over [{}, {}]",
                d.points, d.start_ps, d.stop_ps
            )));
        }
        if !(0.0..=0.5).contains(&d.accidental_floor) {
            return Err(CliError::Validation(format!("dip.accidental_floor: {} outside [0, 0.5]", d.accidental_floor)));
        }
        let s = &self.spectrometer;
        if s.pairs == 0 {
            return Err(CliError::Validation("spectrometer.pairs: must be at least 1".into()));
        }
        for (k, c) in s.channels.iter().enumerate() {
            let path = format!("spectrometer.channels[{k}]");
            at(&path, c.validate())?;
            at(&path, check_gate(&c.map, s.trigger_period_ns))?;
        }
        if s.csi_bin_factor == 0 || !self.grid.points.is_multiple_of(s.csi_bin_factor) {
            return Err(CliError::Validation(format!(
                "spectrometer.csi_bin_factor: {} must divide grid.points ({})",
                s.csi_bin_factor, self.grid.points
            )));
        }
        at("spectrometer.toa_bin_ps", s.toa_bins().map(|_| ()))?;
        at("spectrometer.arrival_bin_ps", s.arrival_bins().map(|_| ()))?;
        if let Some(c) = &self.calibration {
            if !(c.target_fwhm_nm.is_finite() && c.target_fwhm_nm > 0.0) {
                return Err(CliError::Validation(format!(
                    "calibration.target_fwhm_nm: {} must be positive",
                    c.target_fwhm_nm
                )));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, without the output directory.
    pub fn hash(&self) -> String {
        let canonical = RunConfig { out: None, ..self.clone() };
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Source after the optional calibration, and the knob value it chose.
    pub fn calibrated_source(&self, axis: FreqGrid1D) -> Result<(SourceSpec, Option<f64>), CliError> {
        let base = self.source();
        match &self.calibration {
            None => Ok((base, None)),
            Some(c) => {
                let (s, v) = calibrate_marginal_fwhm(&base, axis, c)?;
                Ok((s, Some(v)))
            }
        }
    }

    /// Normalized JSA on the configured grid.
    pub fn jsa(&self) -> Result<(JsaGrid, Option<f64>), CliError> {
        let axis = self.grid.axis()?;
        let (src, knob) = self.calibrated_source(axis)?;
        Ok((src.assemble(axis)?, knob))
    }
}
