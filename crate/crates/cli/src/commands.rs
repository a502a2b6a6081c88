//! One function per subcommand. Each writes its files into an [`Output`]
//! and returns a summary for the terminal and for tests.

use qcomb_core::biphoton::{marginal_spectrum, Arm, Marginal};
use qcomb_core::interference::{
    comb_contrast, csi, dip_scan, distinguishable_toa, extract_qudit, marginal_toa, tooth_spacing, DipMetrics,
    QuditDecomposition, RAYLEIGH_CONTRAST,
};
use qcomb_core::io::{
    write_columns_csv, write_events, write_histogram1d_csv, write_histogram2d_csv, write_jsa_csv, write_matrix_csv,
};
use qcomb_core::spectrometer::{
    analytic_toa, arrival_histogram, binned_csi, reconstruct_csi_histogram, relative_l2, sample_pairs, simulate_events,
    toa_histogram, toa_tooth_period_ps, EventBatch, UniformBins,
};
use qcomb_core::units::SPEED_OF_LIGHT_NM_THZ;
use qcomb_core::Error;
use serde::Serialize;

use crate::config::{Delay, RunConfig};
use crate::error::CliError;
use crate::output::Output;

/// Fraction of the peak at which ToA and arrival widths are read.
pub const WIDTH_FRACTION: f64 = 0.05;
/// Tooth weight counted towards the qudit dimension.
pub const MIN_TOOTH_WEIGHT: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct MarginalSummary {
    pub fwhm_nm: Option<f64>,
    pub fwhm_thz: Option<f64>,
    pub center_nm: Option<f64>,
    pub multimodal: bool,
}

impl From<&Marginal> for MarginalSummary {
    fn from(m: &Marginal) -> Self {
        Self { fwhm_nm: m.fwhm_nm, fwhm_thz: m.fwhm_thz, center_nm: m.center_nm, multimodal: m.multimodal }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JsaReport {
    pub signal: MarginalSummary,
    pub idler: MarginalSummary,
    pub edge_mass_fraction: f64,
    /// Knob value chosen by the calibration, when one is configured.
    pub calibrated_knob: Option<f64>,
}

pub fn cmd_jsa(cfg: &RunConfig, out: &mut Output) -> Result<JsaReport, CliError> {
    let (f, knob) = cfg.jsa()?;
    out.text("jsa.csv", |w, h| write_jsa_csv(w, &h, &f))?;
    let s = marginal_spectrum(&f, Arm::Signal);
    let i = marginal_spectrum(&f, Arm::Idler);
    let nm: Vec<f64> = s.frequency_thz.iter().map(|&v| SPEED_OF_LIGHT_NM_THZ / v).collect();
    out.text("marginals.csv", |w, h| {
        write_columns_csv(
            w,
            &h,
            &["frequency_thz", "wavelength_nm", "signal", "idler"],
            &[&s.frequency_thz, &nm, &s.intensity, &i.intensity],
        )
    })?;
    let report = JsaReport {
        signal: (&s).into(),
        idler: (&i).into(),
        edge_mass_fraction: f.edge_mass_fraction(),
        calibrated_knob: knob,
    };
    out.json("fwhm.json", &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct DipReport {
    #[serde(flatten)]
    pub metrics: DipMetrics,
    pub accidental_floor: f64,
    pub points: usize,
}

pub fn cmd_dip(cfg: &RunConfig, out: &mut Output) -> Result<DipReport, CliError> {
    let (f, _) = cfg.jsa()?;
    let d = &cfg.dip;
    let scan = dip_scan(&f, d.start_ps, d.stop_ps, d.points, d.accidental_floor)?;
    let um: Vec<f64> = scan.delays_ps.iter().map(|&t| t * qcomb_core::units::SPEED_OF_LIGHT_UM_PS).collect();
    out.text("dip_scan.csv", |w, h| {
        let h = h.with("accidental_floor", d.accidental_floor);
        write_columns_csv(w, &h, &["delay_ps", "delay_um", "probability"], &[&scan.delays_ps, &um, &scan.probability])
    })?;
    let report = DipReport { metrics: scan.metrics, accidental_floor: d.accidental_floor, points: d.points };
    out.json("dip_metrics.json", &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct PeakReport {
    pub delay: String,
    pub tau_ps: f64,
    pub count: usize,
    pub no_comb: bool,
    pub positions_thz: Vec<f64>,
    pub heights: Vec<f64>,
    /// Mean spacing of the raw maxima of H.
    pub mean_spacing_thz: Option<f64>,
    /// Period fitted to H divided by its large-delay background.
    pub tooth_spacing_thz: Option<f64>,
    pub expected_spacing_thz: Option<f64>,
    /// ∫H dΔν, equal to 4P(τ).
    pub integral: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuditReport {
    pub delay: String,
    pub tau_ps: f64,
    pub dimension: usize,
    pub min_weight: f64,
    pub max_energy_offset_thz: Option<f64>,
    pub weight_asymmetry: Option<f64>,
    pub decomposition: Option<QuditDecomposition>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CombReport {
    pub peaks: Vec<PeakReport>,
    pub qudits: Vec<QuditReport>,
}

fn tau_of(d: &Delay) -> Result<f64, CliError> {
    Ok(qcomb_core::DelayTime::from_ps(d.ps())?.ps())
}

pub fn cmd_comb(cfg: &RunConfig, delays: &[Delay], out: &mut Output) -> Result<CombReport, CliError> {
    let (f, _) = cfg.jsa()?;
    let axis = *f.axis(Arm::Signal);
    let nu = axis.values();
    let background = distinguishable_toa(&f)?;
    let pump = cfg.pump.center_thz();
    let mut report = CombReport { peaks: Vec::new(), qudits: Vec::new() };
    for d in delays {
        let tau = tau_of(d)?;
        let label = d.label();
        let c = csi(&f, tau)?;
        out.text(&format!("csi_{label}.csv"), |w, h| {
            let h = h.with("delay", &label).with("tau_ps", tau).with("rows", "nu1_thz").with("cols", "nu2_thz");
            write_matrix_csv(w, &h, &nu.len().to_string(), &nu, &nu, c.grid().values())
        })?;
        let toa = marginal_toa(&c)?;
        out.text(&format!("h_{label}.csv"), |w, h| {
            let h = h.with("delay", &label).with("tau_ps", tau);
            write_columns_csv(
                w,
                &h,
                &["delta_nu_thz", "h", "h_background"],
                &[&toa.delta_nu_thz, &toa.values, &background],
            )
        })?;
        let peaks = PeakReport {
            delay: label.clone(),
            tau_ps: tau,
            count: toa.peaks.count(),
            no_comb: toa.no_comb,
            positions_thz: toa.peaks.positions.clone(),
            heights: toa.peaks.heights.clone(),
            mean_spacing_thz: toa.peaks.mean_spacing(),
            tooth_spacing_thz: tooth_spacing(&toa, &background)?,
            expected_spacing_thz: (tau != 0.0).then(|| 1.0 / tau.abs()),
            integral: toa.integral(),
        };
        out.json(&format!("peaks_{label}.json"), &peaks)?;
        let decomposition = if toa.no_comb { None } else { Some(extract_qudit(&c, pump)?) };
        let qudit = QuditReport {
            delay: label.clone(),
            tau_ps: tau,
            dimension: decomposition.as_ref().map_or(0, |q| q.dimension(MIN_TOOTH_WEIGHT)),
            min_weight: MIN_TOOTH_WEIGHT,
            max_energy_offset_thz: decomposition.as_ref().map(|q| q.max_energy_offset()),
            weight_asymmetry: decomposition.as_ref().map(|q| q.weight_asymmetry()),
            decomposition,
        };
        out.json(&format!("qudit_{label}.json"), &qudit)?;
        report.peaks.push(peaks);
        report.qudits.push(qudit);
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct EventsReport {
    pub delay: String,
    pub tau_ps: f64,
    pub seed: u64,
    pub pairs: usize,
    pub coincidences: usize,
    /// Relative L2 distance of the reconstructed CSI to the binned analytic one.
    pub csi_l2: Option<f64>,
    /// Same for the ToA histogram against the jitter-blurred prediction.
    pub toa_l2: Option<f64>,
    pub toa_full_width_ps: Option<f64>,
    pub arrival_full_width_ps: Option<f64>,
    pub width_ratio: Option<f64>,
    pub width_fraction: f64,
    pub toa_tooth_period_ps: Option<f64>,
    /// Fourier contrast of the ToA histogram at the tooth period.
    pub toa_comb_contrast: Option<f64>,
    pub resolution_threshold: f64,
    pub toa_comb_resolved: bool,
    /// Teeth of the analytic H(Δν).
    pub analytic_teeth: usize,
}

fn ratio(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(a? / b?)
}

pub fn cmd_events(cfg: &RunConfig, delays: &[Delay], out: &mut Output) -> Result<Vec<EventsReport>, CliError> {
    let seed = cfg
        .seed
        .ok_or_else(|| CliError::Validation("seed: required for events (set \"seed\" or pass --seed)".into()))?;
    let (f, _) = cfg.jsa()?;
    let spec = &cfg.spectrometer;
    let channels = [&spec.channels[0], &spec.channels[1]];
    let axis = *f.axis(Arm::Signal);
    let csi_bins = UniformBins::from_axis(&axis, spec.csi_bin_factor)?;
    let toa_bins = spec.toa_bins()?;
    let arrival_bins = spec.arrival_bins()?;
    let jitter = [0, 1].map(|k| 1e3 * channels[k].detector.jitter_sigma_ns());
    let hash = cfg.hash();
    let mut reports = Vec::new();
    for d in delays {
        let tau = tau_of(d)?;
        let label = d.label();
        let c = csi(&f, tau)?;
        let batch = match sample_pairs(&c, spec.pairs, seed) {
            Ok(pairs) => simulate_events(&pairs, channels, spec.trigger_period_ns, seed)?,
            // full destructive interference: no pair ever leaves through both ports
            Err(Error::ZeroMass) => {
                EventBatch { records: Vec::new(), triggers: spec.pairs as u64, seed, config_hash: None }
            }
            Err(e) => return Err(e.into()),
        };
        let batch = EventBatch { config_hash: Some(hash.clone()), ..batch };
        let tagged = |h: qcomb_core::io::Header| h.with("delay", &label).with("tau_ps", tau);
        out.text(&format!("events_{label}.txt"), |w, h| write_events(w, &tagged(h), &batch))?;
        let toa = toa_histogram(&batch, toa_bins);
        out.text(&format!("toa_{label}.csv"), |w, h| write_histogram1d_csv(w, &tagged(h), &toa, "ps"))?;
        let rec = reconstruct_csi_histogram(&batch, channels, csi_bins, csi_bins);
        out.text(&format!("csi_hist_{label}.csv"), |w, h| write_histogram2d_csv(w, &tagged(h), &rec, "thz"))?;

        let coincidences = batch.coincidence_count();
        let has_mass = c.norm() > 0.0;
        let observed = coincidences > 0 && has_mass;
        let csi_l2 = if observed {
            Some(relative_l2(&rec.probabilities(), &binned_csi(&c, spec.csi_bin_factor)?)?)
        } else {
            None
        };
        let toa_l2 = if observed {
            Some(relative_l2(&toa.probabilities(), &analytic_toa(&c, channels, toa_bins, jitter)?)?)
        } else {
            None
        };
        let toa_fw = toa.full_width(WIDTH_FRACTION);
        let arrival_fw = arrival_histogram(&batch, 1, arrival_bins).full_width(WIDTH_FRACTION);
        let period = (tau != 0.0).then(|| toa_tooth_period_ps(&channels[0].map, axis.center(), tau));
        let contrast = match period {
            Some(p) if observed => {
                let y: Vec<f64> = toa.counts.iter().map(|&v| v as f64).collect();
                Some(comb_contrast(&toa_bins.centers(), &y, p)?)
            }
            _ => None,
        };
        let report = EventsReport {
            delay: label.clone(),
            tau_ps: tau,
            seed,
            pairs: spec.pairs,
            coincidences,
            csi_l2,
            toa_l2,
            toa_full_width_ps: toa_fw,
            arrival_full_width_ps: arrival_fw,
            width_ratio: ratio(toa_fw, arrival_fw),
            width_fraction: WIDTH_FRACTION,
            toa_tooth_period_ps: period,
            toa_comb_contrast: contrast,
            resolution_threshold: RAYLEIGH_CONTRAST,
            toa_comb_resolved: contrast.is_some_and(|v| v > RAYLEIGH_CONTRAST),
            analytic_teeth: if has_mass { marginal_toa(&c)?.peaks.count() } else { 0 },
        };
        out.json(&format!("events_report_{label}.json"), &report)?;
        reports.push(report);
    }
    Ok(reports)
}

/// Summary printed by `validate`.
#[derive(Debug, Clone, Serialize)]
pub struct ValidateReport {
    pub config_hash: String,
    pub grid_points: usize,
    pub grid_spacing_thz: f64,
    pub delays_ps: Vec<f64>,
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<ValidateReport, CliError> {
    cfg.validate()?;
    let axis = cfg.grid.axis()?;
    Ok(ValidateReport {
        config_hash: cfg.hash(),
        grid_points: axis.len(),
        grid_spacing_thz: axis.spacing(),
        delays_ps: cfg.delays.delays().iter().map(|d| d.ps()).collect(),
    })
}
