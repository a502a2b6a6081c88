use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::trapezoid_weight;

use super::csi::CsiGrid;
use super::toa::marginal_toa;

/// Smallest analytic tooth spacing, in grid samples, accepted for extraction.
pub const MIN_SAMPLES_PER_TOOTH: f64 = 4.0;

/// One frequency-bin pair of the comb.
///
/// Tooth `j` has channel-1 frequency `ν_p/2 + (2j−1)/(4τ)` and channel-2
/// frequency `ν_p/2 − (2j−1)/(4τ)`, so `ν₁ − ν₂ = (2j−1)/(2τ)` sits on a
/// maximum of `1 − cos(2π(ν₁−ν₂)τ)`. Negative `2j−1` are the mirrored teeth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tooth {
    pub j: i64,
    pub nu_plus_thz: f64,
    pub nu_minus_thz: f64,
    /// Intensity centroid of the tooth's cell.
    pub centroid_nu1_thz: f64,
    pub centroid_nu2_thz: f64,
    /// Peak position in H, as ν₂ − ν₁.
    pub delta_nu_thz: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuditDecomposition {
    pub tau_ps: f64,
    pub pump_thz: f64,
    pub grid_spacing_thz: f64,
    pub teeth: Vec<Tooth>,
}

impl QuditDecomposition {
    /// Number of teeth with weight above `min_weight`.
    pub fn dimension(&self, min_weight: f64) -> usize {
        self.teeth.iter().filter(|t| t.weight > min_weight).count()
    }

    /// Largest |ν₁ + ν₂ − ν_p| over the tooth centroids.
    pub fn max_energy_offset(&self) -> f64 {
        self.teeth.iter().map(|t| (t.centroid_nu1_thz + t.centroid_nu2_thz - self.pump_thz).abs()).fold(0.0, f64::max)
    }

    /// Largest |c_j − c_{1−j}| relative to the largest weight, over pairs
    /// mirrored about the comb center.
    pub fn weight_asymmetry(&self) -> f64 {
        let top = self.teeth.iter().map(|t| t.weight).fold(0.0, f64::max);
        let mut worst = 0.0f64;
        for t in &self.teeth {
            if let Some(m) = self.teeth.iter().find(|m| m.j == 1 - t.j) {
                worst = worst.max((t.weight - m.weight).abs());
            }
        }
        if top > 0.0 {
            worst / top
        } else {
            0.0
        }
    }
}

/// Locate the teeth through the peaks of H and weight each by the CSI mass
/// of its Voronoi cell along Δν: `c_j = √(cell mass / N)`.
pub fn extract_qudit(c: &CsiGrid, pump_thz: f64) -> Result<QuditDecomposition> {
    let tau = c.tau_ps();
    let axis = *c.axis();
    let h = axis.spacing();
    if tau == 0.0 {
        return Err(Error::UnresolvedTeeth("no comb at zero delay".into()));
    }
    let samples = 1.0 / (tau.abs() * h);
    if samples < MIN_SAMPLES_PER_TOOTH {
        return Err(Error::UnresolvedTeeth(format!(
            "tooth spacing is {samples:.2} grid samples; use a finer grid or a smaller delay"
        )));
    }
    let toa = marginal_toa(c)?;
    let peaks = &toa.peaks.indices;
    if peaks.is_empty() {
        return Err(Error::UnresolvedTeeth("no teeth above threshold".into()));
    }
    let n = axis.len();
    // cell boundaries (in diagonal index k = d + n − 1) between neighbouring peaks
    let bounds: Vec<f64> = peaks.windows(2).map(|w| 0.5 * (w[0] + w[1]) as f64).collect();
    let cell_of = |k: usize| bounds.partition_point(|&b| b < k as f64);

    let m = peaks.len();
    let (mut mass, mut m1, mut m2) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let g = c.grid();
    for i in 0..n {
        let wi = trapezoid_weight(i, n);
        for j in 0..n {
            let v = wi * trapezoid_weight(j, n) * g.get(i, j);
            if v == 0.0 {
                continue;
            }
            let cell = cell_of(j + n - 1 - i);
            mass[cell] += v;
            m1[cell] += v * axis.offset(i);
            m2[cell] += v * axis.offset(j);
        }
    }
    let total: f64 = mass.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroMass);
    }

    let mut teeth: Vec<Tooth> = peaks
        .iter()
        .enumerate()
        .map(|(cell, &k)| {
            let delta = toa.delta_nu_thz[k];
            // ν₁ − ν₂ = −Δν = (2j − 1)/(2τ)
            let odd = (-delta * 2.0 * tau).round();
            let j = ((odd + 1.0) / 2.0).round() as i64;
            let half = (2 * j - 1) as f64 / (4.0 * tau);
            let (c1, c2) = if mass[cell] > 0.0 {
                (axis.center() + m1[cell] / mass[cell], axis.center() + m2[cell] / mass[cell])
            } else {
                (f64::NAN, f64::NAN)
            };
            Tooth {
                j,
                nu_plus_thz: 0.5 * pump_thz + half,
                nu_minus_thz: 0.5 * pump_thz - half,
                centroid_nu1_thz: c1,
                centroid_nu2_thz: c2,
                delta_nu_thz: delta,
                weight: (mass[cell] / total).sqrt(),
            }
        })
        .collect();
    teeth.sort_by_key(|t| t.j);
    Ok(QuditDecomposition { tau_ps: tau, pump_thz, grid_spacing_thz: h, teeth })
}
