use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::trapezoid_weight;

use crate::biphoton::JsaGrid;

use super::csi::CsiGrid;

use std::f64::consts::TAU;

pub const DEFAULT_PEAK_THRESHOLD: f64 = 0.05;

/// Fourier comb contrast below which adjacent teeth are not resolved:
/// a `1 + C·cos` modulation whose dip-to-peak ratio equals the Rayleigh
/// value 8/π² has `C = (π² − 8)/(π² + 8)`.
pub const RAYLEIGH_CONTRAST: f64 =
    (std::f64::consts::PI * std::f64::consts::PI - 8.0) / (std::f64::consts::PI * std::f64::consts::PI + 8.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakSet {
    pub indices: Vec<usize>,
    pub positions: Vec<f64>,
    pub heights: Vec<f64>,
}

impl PeakSet {
    pub fn count(&self) -> usize {
        self.indices.len()
    }

    /// Mean distance between neighbouring peaks.
    pub fn mean_spacing(&self) -> Option<f64> {
        let n = self.positions.len();
        (n >= 2).then(|| (self.positions[n - 1] - self.positions[0]) / (n - 1) as f64)
    }
}

/// Local maxima above `threshold·max`, thinned so that kept peaks are at
/// least `min_separation` samples apart (taller first, lower index on ties).
pub fn find_peaks(signal: &[f64], positions: &[f64], threshold: f64, min_separation: usize) -> Result<PeakSet> {
    if positions.len() != signal.len() {
        return Err(Error::LengthMismatch { expected: signal.len(), actual: positions.len() });
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidArgument(format!("peak threshold {threshold} must lie in (0, 1)")));
    }
    if min_separation < 2 {
        return Err(Error::InvalidArgument(format!("peak separation {min_separation} must be at least 2")));
    }
    let peak = signal.iter().cloned().fold(0.0, f64::max);
    let empty = PeakSet { indices: vec![], positions: vec![], heights: vec![] };
    if !(peak > 0.0) || signal.len() < 3 {
        return Ok(empty);
    }
    let level = threshold * peak;
    let mut candidates: Vec<usize> = (1..signal.len() - 1)
        .filter(|&i| signal[i] >= level && signal[i] > signal[i - 1] && signal[i] >= signal[i + 1])
        .collect();
    candidates.sort_by(|&a, &b| signal[b].total_cmp(&signal[a]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for c in candidates {
        if kept.iter().all(|&k| k.abs_diff(c) >= min_separation) {
            kept.push(c);
        }
    }
    kept.sort_unstable();
    Ok(PeakSet {
        positions: kept.iter().map(|&i| positions[i]).collect(),
        heights: kept.iter().map(|&i| signal[i]).collect(),
        indices: kept,
    })
}

/// Separation of half the analytic tooth spacing 1/(2τ), in samples of
/// width `spacing`, never below 2.
pub fn default_separation(tau_ps: f64, spacing: f64) -> usize {
    if tau_ps == 0.0 {
        return 2;
    }
    ((1.0 / (2.0 * tau_ps.abs() * spacing)).floor() as usize).max(2)
}

/// H(Δν) = ∫I(ν₁, ν₁+Δν)dν₁ with Δν = ν₂ − ν₁.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalToa {
    pub tau_ps: f64,
    pub delta_nu_thz: Vec<f64>,
    pub values: Vec<f64>,
    pub spacing_thz: f64,
    pub peaks: PeakSet,
    /// Fewer than two teeth were found.
    pub no_comb: bool,
}

impl MarginalToa {
    /// h·ΣH, the exact companion of the tensor trapezoid rule over I.
    pub fn integral(&self) -> f64 {
        self.spacing_thz * self.values.iter().sum::<f64>()
    }
}

/// h·Σ w_i w_j v(i, j) along each diagonal j − i = k − (n − 1).
fn diagonal_sums(n: usize, h: f64, v: impl Fn(usize, usize) -> f64 + Sync) -> Vec<f64> {
    let w = |i: usize| trapezoid_weight(i, n);
    (0..2 * n - 1)
        .into_par_iter()
        .map(|k| {
            let d = k as i64 - (n as i64 - 1);
            let (i0, i1) = if d >= 0 { (0, n - d as usize) } else { ((-d) as usize, n) };
            h * (i0..i1)
                .map(|i| {
                    let j = (i as i64 + d) as usize;
                    w(i) * w(j) * v(i, j)
                })
                .sum::<f64>()
        })
        .collect()
}

fn delta_axis(n: usize, h: f64) -> Vec<f64> {
    (0..2 * n - 1).map(|k| (k as f64 - (n - 1) as f64) * h).collect()
}

/// Diagonal sums of the CSI with trapezoid weights, then default peak search.
pub fn marginal_toa(c: &CsiGrid) -> Result<MarginalToa> {
    let g = c.grid();
    let n = g.dims().0;
    let h = c.axis().spacing();
    let values = diagonal_sums(n, h, |i, j| *g.get(i, j));
    let delta_nu_thz = delta_axis(n, h);
    let peaks = find_peaks(&values, &delta_nu_thz, DEFAULT_PEAK_THRESHOLD, default_separation(c.tau_ps(), h))?;
    Ok(MarginalToa { tau_ps: c.tau_ps(), no_comb: peaks.count() < 2, delta_nu_thz, values, spacing_thz: h, peaks })
}

/// H at large delay, where the exchange term has averaged out:
/// `H∞(Δν) = ∫|f(ν₁,ν₁+Δν)|² + |f(ν₁+Δν,ν₁)|² dν₁`, on the same Δν samples
/// as [`marginal_toa`].
pub fn distinguishable_toa(f: &JsaGrid) -> Result<Vec<f64>> {
    if !f.is_square() {
        return Err(Error::NonSquareGrid);
    }
    let g = f.grid();
    let n = g.dims().0;
    Ok(diagonal_sums(n, g.axis1().spacing(), |i, j| g.get(i, j).norm_sqr() + g.get(j, i).norm_sqr()))
}

/// Fraction of max H∞ below which H/H∞ is not formed.
pub const BACKGROUND_FLOOR: f64 = 0.05;

/// Comb period read from the teeth of H/H∞.
///
/// Dividing by the large-delay background removes the envelope that drags
/// raw maxima of H toward its own peak. Tooth positions are refined with a
/// three-point parabola and the period is the least-squares slope of
/// position against tooth number. Samples next to the masked region are not
/// accepted as teeth. `None` when fewer than two teeth remain.
pub fn tooth_spacing(toa: &MarginalToa, background: &[f64]) -> Result<Option<f64>> {
    let n = toa.values.len();
    if background.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: background.len() });
    }
    let top = background.iter().cloned().fold(0.0, f64::max);
    if !(top > 0.0) || toa.tau_ps == 0.0 {
        return Ok(None);
    }
    let inside: Vec<bool> = background.iter().map(|&b| b > BACKGROUND_FLOOR * top).collect();
    let ratio: Vec<f64> =
        toa.values.iter().zip(background).zip(&inside).map(|((&v, &b), &ok)| if ok { v / b } else { 0.0 }).collect();
    let sep = default_separation(toa.tau_ps, toa.spacing_thz);
    let peaks = find_peaks(&ratio, &toa.delta_nu_thz, 0.5, sep)?;
    let h = toa.spacing_thz;
    let x: Vec<f64> = peaks
        .indices
        .iter()
        .filter(|&&k| k >= 2 && k + 2 < n && inside[k - 2] && inside[k + 2])
        .map(|&k| {
            let (a, b, c) = (ratio[k - 1], ratio[k], ratio[k + 1]);
            let curv = a - 2.0 * b + c;
            let shift = if curv < 0.0 { 0.5 * (a - c) / curv } else { 0.0 };
            toa.delta_nu_thz[k] + shift * h
        })
        .collect();
    if x.len() < 2 {
        return Ok(None);
    }
    // tooth numbers relative to the first, tolerant of a missing tooth
    let guess = 1.0 / toa.tau_ps.abs();
    let rank: Vec<f64> = x.iter().map(|&v| ((v - x[0]) / guess).round()).collect();
    let m = x.len() as f64;
    let (mr, mx) = (rank.iter().sum::<f64>() / m, x.iter().sum::<f64>() / m);
    let sxy: f64 = rank.iter().zip(&x).map(|(r, v)| (r - mr) * (v - mx)).sum();
    let sxx: f64 = rank.iter().map(|r| (r - mr) * (r - mr)).sum();
    Ok((sxx > 0.0).then(|| sxy / sxx))
}

/// Normalized amplitude of the Fourier component of `values` at `period`:
/// `2|Σ y·e^{−i2πx/period}| / Σ y`. Equals 1 for a fully modulated
/// `1 − cos` comb and decays as the teeth blur.
pub fn comb_contrast(positions: &[f64], values: &[f64], period: f64) -> Result<f64> {
    if positions.len() != values.len() {
        return Err(Error::LengthMismatch { expected: values.len(), actual: positions.len() });
    }
    let total: f64 = values.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroMass);
    }
    let z: Complex64 =
        positions.iter().zip(values).map(|(&x, &y)| y * Complex64::from_polar(1.0, -TAU * x / period)).sum();
    Ok(2.0 * z.norm() / total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(x: &[f64], mu: f64, s: f64) -> Vec<f64> {
        x.iter().map(|&v| (-(v - mu).powi(2) / (2.0 * s * s)).exp()).collect()
    }

    #[test]
    fn single_gaussian_peak() {
        let x: Vec<f64> = (0..101).map(|i| i as f64).collect();
        let p = find_peaks(&gauss(&x, 50.0, 5.0), &x, 0.05, 2).unwrap();
        assert_eq!(p.indices, vec![50]);
    }

    #[test]
    fn two_separated_gaussians() {
        let x: Vec<f64> = (0..201).map(|i| i as f64).collect();
        let y: Vec<f64> = gauss(&x, 70.0, 4.0).iter().zip(gauss(&x, 110.0, 4.0)).map(|(a, b)| a + b).collect();
        let p = find_peaks(&y, &x, 0.05, 2).unwrap();
        assert_eq!(p.count(), 2);
        assert_eq!(p.indices, vec![70, 110]);
    }

    #[test]
    fn suppression_prefers_taller_then_lower_index() {
        let x: Vec<f64> = (0..9).map(|i| i as f64).collect();
        let y = [0.0, 1.0, 0.0, 1.0, 0.0, 0.5, 0.0, 0.9, 0.0];
        let p = find_peaks(&y, &x, 0.05, 3).unwrap();
        assert_eq!(p.indices, vec![1, 7]);
        assert!(p.positions.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn threshold_and_zero_signal() {
        let x: Vec<f64> = (0..5).map(|i| i as f64).collect();
        assert_eq!(find_peaks(&[0.0; 5], &x, 0.05, 2).unwrap().count(), 0);
        let y = [0.0, 1.0, 0.0, 0.04, 0.0];
        assert_eq!(find_peaks(&y, &x, 0.05, 2).unwrap().count(), 1);
        assert!(find_peaks(&y, &x, 1.0, 2).is_err());
        assert!(find_peaks(&y, &x, 0.5, 1).is_err());
    }

    #[test]
    fn contrast_of_full_comb_is_one() {
        let x: Vec<f64> = (0..4000).map(|i| i as f64 * 0.01).collect();
        let y: Vec<f64> = x.iter().map(|&v| 1.0 - (TAU * v / 2.0).cos()).collect();
        assert!((comb_contrast(&x, &y, 2.0).unwrap() - 1.0).abs() < 1e-9);
        assert!((RAYLEIGH_CONTRAST - 0.1046).abs() < 1e-4);
    }

    fn synthetic_toa(tau: f64, envelope: &[f64], h: f64) -> MarginalToa {
        let n = envelope.len();
        let delta: Vec<f64> = (0..n).map(|k| (k as f64 - (n / 2) as f64) * h).collect();
        let values: Vec<f64> = delta.iter().zip(envelope).map(|(&x, &e)| e * (1.0 - (TAU * x * tau).cos())).collect();
        let peaks = find_peaks(&values, &delta, DEFAULT_PEAK_THRESHOLD, default_separation(tau, h)).unwrap();
        MarginalToa { tau_ps: tau, no_comb: peaks.count() < 2, delta_nu_thz: delta, values, spacing_thz: h, peaks }
    }

    #[test]
    fn normalized_spacing_ignores_envelope() {
        let h = 0.01;
        let x: Vec<f64> = (0..801).map(|k| (k as f64 - 400.0) * h).collect();
        // double-humped envelope that pulls raw maxima outward
        let env: Vec<f64> = gauss(&x, -1.5, 0.6).iter().zip(gauss(&x, 1.5, 0.6)).map(|(a, b)| a + b).collect();
        let tau = 0.53;
        let toa = synthetic_toa(tau, &env, h);
        let raw = toa.peaks.mean_spacing().unwrap();
        let fitted = tooth_spacing(&toa, &env).unwrap().unwrap();
        assert!((fitted - 1.0 / tau).abs() < 0.05 * h, "{fitted}");
        assert!((raw - 1.0 / tau).abs() > (fitted - 1.0 / tau).abs());
    }

    #[test]
    fn no_spacing_without_teeth() {
        let h = 0.01;
        let x: Vec<f64> = (0..201).map(|k| (k as f64 - 100.0) * h).collect();
        let env = gauss(&x, 0.0, 0.3);
        assert_eq!(tooth_spacing(&synthetic_toa(0.0, &env, h), &env).unwrap(), None);
        assert!(tooth_spacing(&synthetic_toa(1.0, &env, h), &env[1..]).is_err());
    }

    #[test]
    fn default_separation_is_half_tooth_spacing() {
        assert_eq!(default_separation(2.0, 0.01), 25);
        assert_eq!(default_separation(100.0, 0.01), 2);
    }
}
