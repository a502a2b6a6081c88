//! Uniform frequency grids.
//!
//! Sample positions are stored as `center + offset(i)` so that differences
//! between samples are computed from small offsets rather than from two
//! ~190 THz carrier values.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{nm_to_thz, SPEED_OF_LIGHT_NM_THZ};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreqGrid1D {
    center: f64,
    span: f64,
    n: usize,
}

impl FreqGrid1D {
    pub fn new(center_thz: f64, span_thz: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("grid needs at least 2 samples, got {n}")));
        }
        if !(span_thz.is_finite() && span_thz > 0.0) {
            return Err(Error::InvalidArgument(format!("grid span {span_thz} THz must be positive")));
        }
        if !center_thz.is_finite() {
            return Err(Error::InvalidArgument("grid center must be finite".into()));
        }
        Ok(Self { center: center_thz, span: span_thz, n })
    }

    /// Grid centered on `center_nm` whose span corresponds to ±`half_span_nm`
    /// at first order (Δν = c·Δλ/λ²).
    pub fn around_wavelength(center_nm: f64, half_span_nm: f64, n: usize) -> Result<Self> {
        let center = nm_to_thz(center_nm)?;
        let span = SPEED_OF_LIGHT_NM_THZ * 2.0 * half_span_nm / (center_nm * center_nm);
        Self::new(center, span, n)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.span / (self.n - 1) as f64
    }

    /// Detuning of sample `i` from the grid center.
    #[inline]
    pub fn offset(&self, i: usize) -> f64 {
        (i as f64 - 0.5 * (self.n - 1) as f64) * self.spacing()
    }

    #[inline]
    pub fn value(&self, i: usize) -> f64 {
        self.center + self.offset(i)
    }

    pub fn min(&self) -> f64 {
        self.value(0)
    }

    pub fn max(&self) -> f64 {
        self.value(self.n - 1)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.value(i)).collect()
    }

    pub fn offsets(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.offset(i)).collect()
    }

    /// Index of the sample nearest to `thz`, if it lies within half a spacing
    /// of the grid.
    pub fn nearest_index(&self, thz: f64) -> Option<usize> {
        let x = (thz - self.min()) / self.spacing();
        let i = x.round();
        if i < 0.0 || i > (self.n - 1) as f64 {
            None
        } else {
            Some(i as usize)
        }
    }

    /// Same grid with `factor` times as many intervals.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.center, self.span, (self.n - 1) * factor + 1)
    }
}

/// Two-axis sampled function, row-major with `axis1` indexing rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D<T> {
    axis1: FreqGrid1D,
    axis2: FreqGrid1D,
    values: Vec<T>,
}

impl<T: Send + Sync> Grid2D<T> {
    pub fn from_fn<F>(axis1: FreqGrid1D, axis2: FreqGrid1D, f: F) -> Self
    where
        F: Fn(usize, usize) -> T + Sync,
    {
        let n2 = axis2.len();
        let values = (0..axis1.len() * n2).into_par_iter().map(|k| f(k / n2, k % n2)).collect();
        Self { axis1, axis2, values }
    }

    pub fn try_from_fn<F>(axis1: FreqGrid1D, axis2: FreqGrid1D, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<T> + Sync,
    {
        let n2 = axis2.len();
        let values = (0..axis1.len() * n2).into_par_iter().map(|k| f(k / n2, k % n2)).collect::<Result<Vec<T>>>()?;
        Ok(Self { axis1, axis2, values })
    }

    pub fn map<U: Send + Sync, F: Fn(&T) -> U + Sync + Send>(&self, f: F) -> Grid2D<U> {
        Grid2D { axis1: self.axis1, axis2: self.axis2, values: self.values.par_iter().map(f).collect() }
    }
}

impl<T> Grid2D<T> {
    pub fn from_values(axis1: FreqGrid1D, axis2: FreqGrid1D, values: Vec<T>) -> Result<Self> {
        let expected = axis1.len() * axis2.len();
        if values.len() != expected {
            return Err(Error::LengthMismatch { expected, actual: values.len() });
        }
        Ok(Self { axis1, axis2, values })
    }

    pub fn axis1(&self) -> &FreqGrid1D {
        &self.axis1
    }

    pub fn axis2(&self) -> &FreqGrid1D {
        &self.axis2
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.axis1.len(), self.axis2.len())
    }

    pub fn is_square(&self) -> bool {
        self.axis1 == self.axis2
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.values[i * self.axis2.len() + j]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[T] {
        let n2 = self.axis2.len();
        &self.values[i * n2..(i + 1) * n2]
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}
