use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::FreqGrid1D;
use crate::interference::CsiGrid;
use crate::quad::full_width;

use super::events::{Channel, EventBatch};

/// `n` bins of equal `width` starting at `lo`; the upper edge is exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformBins {
    pub lo: f64,
    pub width: f64,
    pub n: usize,
}

impl UniformBins {
    pub fn new(lo: f64, width: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && width > 0.0 && width.is_finite() && n >= 1) {
            return Err(Error::InvalidArgument(format!("invalid bins: lo {lo}, width {width}, n {n}")));
        }
        Ok(Self { lo, width, n })
    }

    /// Odd number of bins, one centered on 0, reaching at least `half_range`.
    pub fn centered(width: f64, half_range: f64) -> Result<Self> {
        if !(half_range > 0.0) {
            return Err(Error::InvalidArgument(format!("half range {half_range} must be positive")));
        }
        let side = (half_range / width - 0.5).max(0.0).ceil() as usize;
        Self::new(-(side as f64 + 0.5) * width, width, 2 * side + 1)
    }

    /// One bin per `factor` samples of `axis`, edges on sample-cell boundaries.
    pub fn from_axis(axis: &FreqGrid1D, factor: usize) -> Result<Self> {
        if factor == 0 || !axis.len().is_multiple_of(factor) {
            return Err(Error::InvalidArgument(format!(
                "aggregation factor {factor} must divide the axis length {}",
                axis.len()
            )));
        }
        let h = axis.spacing();
        Self::new(axis.min() - 0.5 * h, factor as f64 * h, axis.len() / factor)
    }

    pub fn hi(&self) -> f64 {
        self.lo + self.n as f64 * self.width
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.n).map(|k| self.lo + k as f64 * self.width).collect()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.lo + (k as f64 + 0.5) * self.width).collect()
    }

    pub fn index(&self, x: f64) -> Option<usize> {
        let k = ((x - self.lo) / self.width).floor();
        (k >= 0.0 && k < self.n as f64).then_some(k as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram1D {
    pub bins: UniformBins,
    pub counts: Vec<u64>,
    /// Entries outside the bin range.
    pub dropped: u64,
}

impl Histogram1D {
    pub fn new(bins: UniformBins) -> Self {
        Self { counts: vec![0; bins.n], bins, dropped: 0 }
    }

    pub fn fill(&mut self, x: f64) {
        match self.bins.index(x) {
            Some(k) => self.counts[k] += 1,
            None => self.dropped += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        normalize_counts(&self.counts)
    }

    /// Width where the counts first and last reach `fraction` of the peak.
    pub fn full_width(&self, fraction: f64) -> Option<f64> {
        let c: Vec<f64> = self.counts.iter().map(|&v| v as f64).collect();
        let centers = self.bins.centers();
        full_width(&c, fraction, |i| centers[i])
    }
}

/// Counts over (ν₁, ν₂), rows along `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram2D {
    pub x: UniformBins,
    pub y: UniformBins,
    pub counts: Vec<u64>,
    /// Coincidences whose times fell outside a map band or the bin range.
    pub dropped: u64,
}

impl Histogram2D {
    pub fn new(x: UniformBins, y: UniformBins) -> Self {
        Self { counts: vec![0; x.n * y.n], x, y, dropped: 0 }
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.y.n + j]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        normalize_counts(&self.counts)
    }

    /// Counts summed over ν₂ (`axis == 1`) or ν₁ (`axis == 2`).
    pub fn marginal(&self, axis: u8) -> Vec<u64> {
        if axis == 1 {
            (0..self.x.n).map(|i| (0..self.y.n).map(|j| self.get(i, j)).sum()).collect()
        } else {
            (0..self.y.n).map(|j| (0..self.x.n).map(|i| self.get(i, j)).sum()).collect()
        }
    }

    /// Counts summed along diagonals of ν₂ − ν₁, as (Δν centers, values).
    /// Requires identical bin widths on both axes.
    pub fn difference_profile(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        if (self.x.width - self.y.width).abs() > 1e-12 * self.x.width {
            return Err(Error::InvalidArgument("difference profile needs equal bin widths".into()));
        }
        let (nx, ny) = (self.x.n as i64, self.y.n as i64);
        let offset = self.y.lo - self.x.lo;
        let mut pos = Vec::new();
        let mut val = Vec::new();
        for d in -(nx - 1)..ny {
            let mut s = 0u64;
            for i in 0..nx {
                let j = i + d;
                if (0..ny).contains(&j) {
                    s += self.get(i as usize, j as usize);
                }
            }
            pos.push(offset + d as f64 * self.x.width);
            val.push(s as f64);
        }
        Ok((pos, val))
    }
}

fn normalize_counts(c: &[u64]) -> Vec<f64> {
    let total: u64 = c.iter().sum();
    if total == 0 {
        return vec![0.0; c.len()];
    }
    c.iter().map(|&v| v as f64 / total as f64).collect()
}

/// Histogram of t₂ − t₁ in ps over coincident records.
pub fn toa_histogram(batch: &EventBatch, bins: UniformBins) -> Histogram1D {
    let mut h = Histogram1D::new(bins);
    for (t1, t2) in batch.coincidences() {
        h.fill(1e3 * (t2 - t1));
    }
    h
}

/// Histogram of one channel's arrival times in ps over coincident records.
pub fn arrival_histogram(batch: &EventBatch, channel: u8, bins: UniformBins) -> Histogram1D {
    let mut h = Histogram1D::new(bins);
    for (t1, t2) in batch.coincidences() {
        h.fill(1e3 * if channel == 1 { t1 } else { t2 });
    }
    h
}

/// Invert both arrival times of every coincidence and bin the frequencies.
pub fn reconstruct_csi_histogram(
    batch: &EventBatch,
    channels: [&Channel; 2],
    x: UniformBins,
    y: UniformBins,
) -> Histogram2D {
    let mut h = Histogram2D::new(x, y);
    for (t1, t2) in batch.coincidences() {
        let cell = channels[0]
            .map
            .invert_time_to_freq(t1)
            .ok()
            .zip(channels[1].map.invert_time_to_freq(t2).ok())
            .and_then(|(a, b)| Some((x.index(a)?, y.index(b)?)));
        match cell {
            Some((i, j)) => h.counts[i * y.n + j] += 1,
            None => h.dropped += 1,
        }
    }
    h
}

/// CSI cell masses summed into `factor × factor` blocks and normalized,
/// laid out like [`Histogram2D`] over `UniformBins::from_axis(axis, factor)`.
pub fn binned_csi(c: &CsiGrid, factor: usize) -> Result<Vec<f64>> {
    let axis = *c.axis();
    let bins = UniformBins::from_axis(&axis, factor)?;
    let n = axis.len();
    let m = bins.n;
    let g = c.grid();
    let mut out = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            out[(i / factor) * m + j / factor] += g.get(i, j);
        }
    }
    let total: f64 = out.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroMass);
    }
    out.iter_mut().for_each(|v| *v /= total);
    Ok(out)
}

/// Sub-samples per cell edge used for the analytic ToA distribution.
const CELL_SUBSAMPLES: usize = 6;

/// Distribution of t₂ − t₁ (ps) implied by the CSI density and the two maps,
/// binned on `bins` and blurred by Gaussian jitter of the given standard
/// deviations (ps). Mass falling outside the bins is lost, as in the
/// histogram.
pub fn analytic_toa(
    c: &CsiGrid,
    channels: [&Channel; 2],
    bins: UniformBins,
    jitter_sigma_ps: [f64; 2],
) -> Result<Vec<f64>> {
    let axis = *c.axis();
    let n = axis.len();
    let h = axis.spacing();
    let g = c.grid();
    let total: f64 = g.values().iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroMass);
    }
    let m = CELL_SUBSAMPLES;
    let sub: Vec<f64> = (0..m).map(|s| ((s as f64 + 0.5) / m as f64 - 0.5) * h).collect();
    // arrival times (ps) at every sub-sample, per channel
    let times = |ch: &Channel| -> Vec<f64> {
        (0..n)
            .flat_map(|i| sub.iter().map(move |&d| (i, d)))
            .map(|(i, d)| 1e3 * ch.map.time_unchecked(axis.value(i) + d))
            .collect()
    };
    let (t1, t2) = (times(channels[0]), times(channels[1]));
    let share = 1.0 / (m * m) as f64 / total;
    let raw = (0..n)
        .into_par_iter()
        .fold(
            || vec![0.0; bins.n],
            |mut acc, i| {
                for j in 0..n {
                    let v = *g.get(i, j);
                    if v == 0.0 {
                        continue;
                    }
                    for a in &t1[i * m..(i + 1) * m] {
                        for b in &t2[j * m..(j + 1) * m] {
                            if let Some(k) = bins.index(b - a) {
                                acc[k] += v * share;
                            }
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0.0; bins.n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let sigma = jitter_sigma_ps[0].hypot(jitter_sigma_ps[1]);
    Ok(gaussian_blur(&raw, bins.width, sigma))
}

/// Discrete convolution with a unit-mass Gaussian of standard deviation
/// `sigma` sampled on the bin grid.
pub fn gaussian_blur(values: &[f64], width: f64, sigma: f64) -> Vec<f64> {
    if !(sigma > 0.0) {
        return values.to_vec();
    }
    let reach = (6.0 * sigma / width).ceil() as i64;
    let kernel: Vec<f64> = (-reach..=reach).map(|k| (-0.5 * (k as f64 * width / sigma).powi(2)).exp()).collect();
    let norm: f64 = kernel.iter().sum();
    let n = values.len() as i64;
    (0..n)
        .map(|i| {
            (-reach..=reach)
                .filter(|k| (0..n).contains(&(i - k)))
                .map(|k| values[(i - k) as usize] * kernel[(k + reach) as usize])
                .sum::<f64>()
                / norm
        })
        .collect()
}

/// ‖estimate − reference‖₂ / ‖reference‖₂.
pub fn relative_l2(estimate: &[f64], reference: &[f64]) -> Result<f64> {
    if estimate.len() != reference.len() {
        return Err(Error::LengthMismatch { expected: reference.len(), actual: estimate.len() });
    }
    let den: f64 = reference.iter().map(|r| r * r).sum::<f64>().sqrt();
    if !(den > 0.0) {
        return Err(Error::ZeroMass);
    }
    let num: f64 = estimate.iter().zip(reference).map(|(e, r)| (e - r).powi(2)).sum::<f64>().sqrt();
    Ok(num / den)
}
