use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::biphoton::JsaGrid;
use crate::error::{Error, Result};
use crate::quad::{integrate_2d, trapezoid_weight};
use crate::units::SPEED_OF_LIGHT_UM_PS;

use super::csi::csi;

use std::f64::consts::TAU;

/// Precomputed diagonal sums that make P(τ) an O(n) evaluation.
///
/// With trapezoid weights w and d = i − j:
/// `∫∫I = h²·[2A − 2·Re Σ_d C_d·e^{i2π·d·h·τ}]`, where
/// `A = Σ w_i w_j |f_ij|²` and `C_d = Σ_{i−j=d} w_i w_j f_ij·conj(f_ji)`.
#[derive(Debug, Clone)]
pub struct CoincidenceKernel {
    h: f64,
    a: f64,
    c0: f64,
    /// C_d for d = 1..n−1.
    c: Vec<Complex64>,
}

impl CoincidenceKernel {
    pub fn new(f: &JsaGrid) -> Result<Self> {
        if !f.is_square() {
            return Err(Error::NonSquareGrid);
        }
        let g = f.grid();
        let n = g.dims().0;
        let w = |i: usize| trapezoid_weight(i, n);
        let a: f64 = (0..n)
            .into_par_iter()
            .map(|i| g.row(i).iter().enumerate().map(|(j, z)| w(i) * w(j) * z.norm_sqr()).sum::<f64>())
            .sum();
        let diag_sum = |d: usize| -> Complex64 {
            (0..n - d).map(|j| w(j + d) * w(j) * *g.get(j + d, j) * g.get(j, j + d).conj()).sum()
        };
        let c0 = diag_sum(0).re;
        let c = (1..n).into_par_iter().map(diag_sum).collect();
        Ok(Self { h: g.axis1().spacing(), a, c0, c })
    }

    /// P(τ) = ¼∫∫I.
    pub fn probability(&self, tau_ps: f64) -> f64 {
        let mut cross = self.c0;
        for (k, cd) in self.c.iter().enumerate() {
            let (s, c) = (TAU * (k + 1) as f64 * self.h * tau_ps).sin_cos();
            cross += 2.0 * (cd.re * c - cd.im * s);
        }
        0.5 * self.h * self.h * (self.a - cross)
    }
}

/// P(τ) = ¼∫∫I(ν₁,ν₂,τ).
pub fn coincidence_probability(f: &JsaGrid, tau_ps: f64) -> Result<f64> {
    Ok(CoincidenceKernel::new(f)?.probability(tau_ps))
}

/// P(τ) through the full CSI map (slow reference route).
pub fn coincidence_probability_from_csi(f: &JsaGrid, tau_ps: f64) -> Result<f64> {
    Ok(0.25 * integrate_2d(csi(f, tau_ps)?.grid()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipMetrics {
    pub baseline: f64,
    pub minimum: f64,
    pub tau_at_minimum_ps: f64,
    pub visibility: f64,
    pub fwhm_fs: f64,
    pub fwhm_um: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DipScan {
    pub delays_ps: Vec<f64>,
    pub probability: Vec<f64>,
    /// Constant added to every sample to mimic accidental coincidences.
    pub accidental_floor: f64,
    pub metrics: DipMetrics,
}

/// Evenly spaced delays in [start, stop].
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    (0..n).map(|k| start + (stop - start) * k as f64 / (n - 1) as f64).collect()
}

/// Scan P(τ) over `n` delays in [start, stop] and extract dip metrics.
pub fn dip_scan(f: &JsaGrid, start_ps: f64, stop_ps: f64, n: usize, accidental_floor: f64) -> Result<DipScan> {
    if n < 5 || !(stop_ps > start_ps) {
        return Err(Error::InvalidArgument(format!(
            "dip scan needs at least 5 samples over an increasing range, got {n} over [{start_ps}, {stop_ps}]"
        )));
    }
    if !(0.0..=0.5).contains(&accidental_floor) {
        return Err(Error::InvalidArgument(format!("accidental floor {accidental_floor} outside [0, 0.5]")));
    }
    let kernel = CoincidenceKernel::new(f)?;
    let delays_ps = linspace(start_ps, stop_ps, n);
    let probability: Vec<f64> =
        delays_ps.par_iter().map(|&t| (kernel.probability(t) + accidental_floor).clamp(0.0, 1.0)).collect();
    let metrics = dip_metrics(&delays_ps, &probability)?;
    Ok(DipScan { delays_ps, probability, accidental_floor, metrics })
}

/// Largest spread inside each baseline window, as a fraction of the dip depth.
pub const BASELINE_FLATNESS: f64 = 0.05;

/// Baseline from the outer 10% of samples, half-depth crossings by linear
/// interpolation on either side of the minimum.
pub fn dip_metrics(delays_ps: &[f64], p: &[f64]) -> Result<DipMetrics> {
    let n = p.len();
    if delays_ps.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: delays_ps.len() });
    }
    let outer = (n / 20).max(1);
    let baseline = (p[..outer].iter().sum::<f64>() + p[n - outer..].iter().sum::<f64>()) / (2 * outer) as f64;
    let (imin, &minimum) = p
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::UnresolvedDip("empty scan".into()))?;
    if imin < 2 || imin + 3 > n {
        return Err(Error::UnresolvedDip(format!("minimum at scan edge (sample {imin} of {n})")));
    }
    if !(baseline > minimum) {
        return Err(Error::UnresolvedDip("no dip below the baseline".into()));
    }
    let depth = baseline - minimum;
    for window in [&p[..outer], &p[n - outer..]] {
        let lo = window.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = window.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > BASELINE_FLATNESS * depth {
            return Err(Error::UnresolvedDip("scan edges have not reached a flat baseline; widen the scan".into()));
        }
    }
    let half = 0.5 * (baseline + minimum);
    let lerp = |a: usize, b: usize| {
        let t = (half - p[a]) / (p[b] - p[a]);
        delays_ps[a] + t * (delays_ps[b] - delays_ps[a])
    };
    let left = (0..imin).rev().find(|&k| p[k] >= half);
    let right = (imin + 1..n).find(|&k| p[k] >= half);
    let (Some(l), Some(r)) = (left, right) else {
        return Err(Error::UnresolvedDip("half-depth crossing outside the scan".into()));
    };
    if l < outer || r >= n - outer {
        return Err(Error::UnresolvedDip("dip wings reach the baseline window; widen the scan".into()));
    }
    let fwhm_ps = lerp(r - 1, r) - lerp(l + 1, l);
    Ok(DipMetrics {
        baseline,
        minimum,
        tau_at_minimum_ps: delays_ps[imin],
        visibility: (baseline - minimum) / baseline,
        fwhm_fs: fwhm_ps * 1e3,
        fwhm_um: fwhm_ps * SPEED_OF_LIGHT_UM_PS,
    })
}
