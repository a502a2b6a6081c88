use num_complex::Complex64;
use rayon::prelude::*;

use crate::biphoton::JsaGrid;
use crate::error::{Error, Result};
use crate::grid::{FreqGrid1D, Grid2D};
use crate::quad::{integrate_2d, trapezoid};

use std::f64::consts::{PI, TAU};

/// (cos, sin) of 2π·d·h·τ for d = i − j ∈ [−(n−1), n−1], stored at `d + n − 1`.
pub(crate) fn phase_table(axis: &FreqGrid1D, tau_ps: f64) -> Vec<(f64, f64)> {
    let n = axis.len() as i64;
    let h = axis.spacing();
    (-(n - 1)..n).map(|d| (TAU * d as f64 * h * tau_ps).sin_cos()).map(|(s, c)| (c, s)).collect()
}

/// sin²(π·d·h·τ) = (1 − cos)/2, same layout as [`phase_table`].
fn half_angle_table(axis: &FreqGrid1D, tau_ps: f64) -> Vec<f64> {
    let n = axis.len() as i64;
    let h = axis.spacing();
    (-(n - 1)..n).map(|d| (PI * d as f64 * h * tau_ps).sin().powi(2)).collect()
}

fn square_axis(f: &JsaGrid) -> Result<FreqGrid1D> {
    if !f.is_square() {
        return Err(Error::NonSquareGrid);
    }
    Ok(*f.grid().axis1())
}

/// g(ν₁,ν₂,τ) = f(ν₁,ν₂) − f(ν₂,ν₁)·exp(−i2π(ν₁−ν₂)τ).
pub fn interference_amplitude(f: &JsaGrid, tau_ps: f64) -> Result<Grid2D<Complex64>> {
    let axis = square_axis(f)?;
    let n = axis.len();
    let table = phase_table(&axis, tau_ps);
    let g = f.grid();
    Ok(Grid2D::from_fn(axis, axis, |i, j| {
        let (c, s) = table[i + n - 1 - j];
        *g.get(i, j) - *g.get(j, i) * Complex64::new(c, -s)
    }))
}

/// Correlated spectral intensity at one delay.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiGrid {
    grid: Grid2D<f64>,
    tau_ps: f64,
    norm: f64,
    general_route: bool,
}

impl CsiGrid {
    fn new(grid: Grid2D<f64>, tau_ps: f64, general_route: bool) -> Self {
        let norm = integrate_2d(&grid);
        Self { grid, tau_ps, norm, general_route }
    }

    /// Wrap an intensity map (for instance a measured one) taken at `tau_ps`.
    pub fn from_intensity(grid: Grid2D<f64>, tau_ps: f64) -> Result<Self> {
        if !grid.is_square() {
            return Err(Error::NonSquareGrid);
        }
        if grid.values().iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Domain("intensity must be finite and nonnegative".into()));
        }
        Ok(Self::new(grid, tau_ps, false))
    }

    pub fn grid(&self) -> &Grid2D<f64> {
        &self.grid
    }

    pub fn axis(&self) -> &FreqGrid1D {
        self.grid.axis1()
    }

    pub fn tau_ps(&self) -> f64 {
        self.tau_ps
    }

    /// N = ∫∫I.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// True when the amplitude was complex and |g|² was used.
    pub fn used_general_route(&self) -> bool {
        self.general_route
    }

    /// Largest |I(a,b) − I(b,a)| relative to max I (0 for an all-zero map).
    pub fn max_asymmetry(&self) -> f64 {
        let (n, _) = self.grid.dims();
        let peak = self.max_value();
        if peak == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.grid.get(i, j) - self.grid.get(j, i)).abs());
            }
        }
        worst / peak
    }

    /// Largest diagonal value relative to max I.
    pub fn max_diagonal(&self) -> f64 {
        let peak = self.max_value();
        if peak == 0.0 {
            return 0.0;
        }
        (0..self.grid.dims().0).map(|i| *self.grid.get(i, i)).fold(0.0, f64::max) / peak
    }

    pub fn max_value(&self) -> f64 {
        self.grid.values().iter().cloned().fold(0.0, f64::max)
    }

    /// ∫I dν₂ as a function of ν₁ (`channel == 1`) or ∫I dν₁ (`channel == 2`).
    pub fn channel_marginal(&self, channel: u8) -> Vec<f64> {
        let (n1, n2) = self.grid.dims();
        let h2 = self.grid.axis2().spacing();
        let h1 = self.grid.axis1().spacing();
        if channel == 1 {
            (0..n1).map(|i| trapezoid(self.grid.row(i), h2)).collect()
        } else {
            (0..n2)
                .map(|j| {
                    let col: Vec<f64> = (0..n1).map(|i| *self.grid.get(i, j)).collect();
                    trapezoid(&col, h1)
                })
                .collect()
        }
    }
}

/// I = |f₁₂|² + |f₂₁|² − 2 f₁₂ f₂₁ cos(2π(ν₁−ν₂)τ) for real f; complex
/// amplitudes are routed through |g|².
pub fn csi(f: &JsaGrid, tau_ps: f64) -> Result<CsiGrid> {
    let axis = square_axis(f)?;
    match f.real_values() {
        Some(v) => {
            let n = axis.len();
            let table = half_angle_table(&axis, tau_ps);
            // a² + b² − 2ab·cos written as (a − b)² + 4ab·sin²(·/2)
            let grid = Grid2D::from_fn(axis, axis, |i, j| {
                let a = v[i * n + j];
                let b = v[j * n + i];
                ((a - b) * (a - b) + 4.0 * a * b * table[i + n - 1 - j]).max(0.0)
            });
            Ok(CsiGrid::new(grid, tau_ps, false))
        }
        None => csi_general(f, tau_ps),
    }
}

/// I = |g|², valid for any amplitude.
pub fn csi_general(f: &JsaGrid, tau_ps: f64) -> Result<CsiGrid> {
    let g = interference_amplitude(f, tau_ps)?;
    Ok(CsiGrid::new(g.map(|z| z.norm_sqr()), tau_ps, !f.is_real()))
}

/// Result of comparing I with the two-slit form
/// `I₁ + I₂ − 2√(I₁I₂)cos(2π(ν₁−ν₂)τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleSlitCheck {
    pub residual: f64,
    pub max_intensity: f64,
}

impl DoubleSlitCheck {
    pub fn holds(&self, relative: f64) -> bool {
        self.residual <= relative * self.max_intensity
    }
}

/// Evaluates the two-slit form with I₁ = f(ν₁,ν₂)², I₂ = f(ν₂,ν₁)² against
/// |g|². Where f₁₂ and f₂₁ differ in sign the square root carries that sign.
pub fn double_slit_identity(f: &JsaGrid, tau_ps: f64) -> Result<DoubleSlitCheck> {
    let axis = square_axis(f)?;
    let v = f.real_values().ok_or(Error::ComplexAmplitude)?;
    let reference = csi_general(f, tau_ps)?;
    let n = axis.len();
    let table = phase_table(&axis, tau_ps);
    let residual = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut worst = 0.0f64;
            for j in 0..n {
                let a = v[i * n + j];
                let b = v[j * n + i];
                let (i1, i2) = (a * a, b * b);
                let sign = if a * b < 0.0 { -1.0 } else { 1.0 };
                let two_slit = i1 + i2 - 2.0 * sign * (i1 * i2).sqrt() * table[i + n - 1 - j].0;
                worst = worst.max((reference.grid.get(i, j) - two_slit).abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    Ok(DoubleSlitCheck { residual, max_intensity: reference.max_value() })
}
