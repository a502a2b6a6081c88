//! Trapezoidal quadrature on uniform grids, plus a few 1D curve measurements
//! (crossings, widths) shared by the analysis code.

use crate::error::{Error, Result};
use crate::grid::{FreqGrid1D, Grid2D};

/// Trapezoid rule with uniform step `h`.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            h * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

/// Trapezoid weight of sample `i` out of `n` (without the step factor).
#[inline]
pub fn trapezoid_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.5
    } else {
        1.0
    }
}

pub fn integrate_1d(values: &[f64], grid: &FreqGrid1D) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), actual: values.len() });
    }
    Ok(trapezoid(values, grid.spacing()))
}

/// Tensor-product trapezoid rule.
pub fn integrate_2d(grid: &Grid2D<f64>) -> f64 {
    let n1 = grid.dims().0;
    let mut total = 0.0;
    for i in 0..n1 {
        total += trapezoid_weight(i, n1) * trapezoid(grid.row(i), 1.0);
    }
    total * grid.axis1().spacing() * grid.axis2().spacing()
}

/// Outermost positions where `values` crosses `level`, found by linear
/// interpolation between samples. `x(i)` maps a sample index to position.
///
/// Returns `None` when no sample reaches `level` or the signal is still above
/// it at either end.
pub fn outer_crossings(values: &[f64], level: f64, x: impl Fn(usize) -> f64) -> Option<(f64, f64)> {
    let first = values.iter().position(|&v| v >= level)?;
    let last = values.iter().rposition(|&v| v >= level)?;
    if first == 0 || last + 1 == values.len() {
        return None;
    }
    let lerp = |a: usize, b: usize| {
        let (va, vb) = (values[a], values[b]);
        let t = if vb == va { 0.5 } else { (level - va) / (vb - va) };
        x(a) + t * (x(b) - x(a))
    };
    Some((lerp(first - 1, first), lerp(last, last + 1)))
}

/// Number of upward plus downward crossings of `level`.
pub fn count_crossings(values: &[f64], level: f64) -> usize {
    values.windows(2).filter(|w| (w[0] >= level) != (w[1] >= level)).count()
}

/// Full width between the outermost crossings of `fraction · max`.
pub fn full_width(values: &[f64], fraction: f64, x: impl Fn(usize) -> f64) -> Option<f64> {
    let peak = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(peak > 0.0) {
        return None;
    }
    outer_crossings(values, fraction * peak, x).map(|(a, b)| b - a)
}
