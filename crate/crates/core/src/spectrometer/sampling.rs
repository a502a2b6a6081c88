use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interference::CsiGrid;

/// Draws per RNG substream; fixed so results do not depend on thread count.
pub(crate) const CHUNK: usize = 1 << 16;

/// RNG for substream `chunk` of `seed`. `domain` keeps independent stages
/// that share a seed apart.
pub(crate) fn substream(seed: u64, domain: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((domain << 48) | chunk as u64);
    rng
}

/// `n` i.i.d. pairs (ν₁, ν₂) in THz drawn from the CSI treated as a
/// piecewise-constant density: a cell is chosen by inverse CDF over the
/// flattened grid, then the point is spread uniformly inside it.
pub fn sample_pairs(c: &CsiGrid, n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let g = c.grid();
    let (n1, n2) = g.dims();
    let mut cdf = Vec::with_capacity(n1 * n2);
    let mut acc = 0.0;
    for &v in g.values() {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("CSI value {v} is negative or not finite")));
        }
        acc += v;
        cdf.push(acc);
    }
    if !(acc > 0.0) {
        return Err(Error::ZeroMass);
    }
    let (a1, a2) = (*g.axis1(), *g.axis2());
    let (h1, h2) = (a1.spacing(), a2.spacing());
    let chunks = n.div_ceil(CHUNK);
    let out: Vec<Vec<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, 0, k);
            let len = CHUNK.min(n - k * CHUNK);
            (0..len)
                .map(|_| {
                    let u = rng.random::<f64>() * acc;
                    let cell = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                    let (i, j) = (cell / n2, cell % n2);
                    let x = a1.value(i) + (rng.random::<f64>() - 0.5) * h1;
                    let y = a2.value(j) + (rng.random::<f64>() - 0.5) * h2;
                    (x, y)
                })
                .collect()
        })
        .collect();
    Ok(out.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{FreqGrid1D, Grid2D};

    fn csi_from(vals: Vec<f64>, n: usize) -> CsiGrid {
        let a = FreqGrid1D::new(190.0, 1.0, n).unwrap();
        CsiGrid::from_intensity(Grid2D::from_values(a, a, vals).unwrap(), 0.0).unwrap()
    }

    #[test]
    fn point_mass_stays_in_its_cell() {
        let mut v = vec![0.0; 16];
        v[1] = 1.0; // (0, 1)
        let c = csi_from(v, 4);
        let ax = *c.axis();
        let h = ax.spacing();
        for (x, y) in sample_pairs(&c, 5000, 3).unwrap() {
            assert!((x - ax.value(0)).abs() <= 0.5 * h);
            assert!((y - ax.value(1)).abs() <= 0.5 * h);
        }
    }

    #[test]
    fn equal_cells_split_evenly() {
        let mut v = vec![0.0; 16];
        v[1] = 1.0;
        v[14] = 1.0; // (3, 2)
        let c = csi_from(v, 4);
        let n = 200_000;
        let ax = *c.axis();
        let first = sample_pairs(&c, n, 11).unwrap().iter().filter(|p| p.0 < ax.value(1)).count();
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((first as f64 - 0.5 * n as f64).abs() < 4.0 * sigma, "{first}");
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let c = csi_from((0..64).map(|k| (k % 7) as f64).collect(), 8);
        let a = sample_pairs(&c, 100_000, 42).unwrap();
        assert_eq!(a, sample_pairs(&c, 100_000, 42).unwrap());
        assert_ne!(a, sample_pairs(&c, 100_000, 43).unwrap());
    }

    #[test]
    fn zero_mass_and_empty_request_rejected() {
        let c = csi_from(vec![0.0; 16], 4);
        assert_eq!(sample_pairs(&c, 10, 0), Err(Error::ZeroMass));
        let c = csi_from(vec![1.0; 16], 4);
        assert!(sample_pairs(&c, 0, 0).is_err());
    }
}
