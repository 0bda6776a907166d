//! Periodic rectangular grids.
//!
//! A grid discretizes a centered box `[-L/2, L/2)^n` (n = 1 or 2) with a
//! power-of-two number of points per axis, so every spectral transform is a
//! plain FFT. Coordinates are `x_m = -L/2 + m dx`; the dual angular
//! wavenumbers are the standard discrete set `2 pi k / L` with the Nyquist
//! mode assigned to the negative end, i.e. `xi in [-pi N / L, pi N / L)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One axis of a periodic grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    /// Physical length L of the periodic box along this axis.
    pub length: f64,
    /// Number of sample points N (power of two, >= 8).
    pub points: usize,
}

impl Axis {
    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Coordinate of sample `m`, centered: `-L/2 + m dx`.
    pub fn coord(&self, m: usize) -> f64 {
        -0.5 * self.length + m as f64 * self.spacing()
    }

    /// Angular wavenumber of FFT bin `k` (natural FFT bin order, Nyquist negative).
    pub fn wavenumber(&self, k: usize) -> f64 {
        let n = self.points;
        let k_signed = if k < n / 2 { k as isize } else { k as isize - n as isize };
        2.0 * std::f64::consts::PI * k_signed as f64 / self.length
    }

    /// Largest resolvable angular wavenumber, `pi N / L`.
    pub fn max_wavenumber(&self) -> f64 {
        std::f64::consts::PI * self.points as f64 / self.length
    }
}

/// Periodic rectangular grid in one or two dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    /// Build a grid. Each axis needs a positive length and a power-of-two
    /// point count of at least 8.
    pub fn new(axes: &[(f64, usize)]) -> Result<Arc<Grid>> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::BadDimension(axes.len()));
        }
        for &(l, n) in axes {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::BadExtent(l));
            }
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::BadPointCount(n));
            }
        }
        Ok(Arc::new(Grid {
            axes: axes.iter().map(|&(length, points)| Axis { length, points }).collect(),
        }))
    }

    /// Convenience constructor for a 1-D grid.
    pub fn line(length: f64, points: usize) -> Result<Arc<Grid>> {
        Grid::new(&[(length, points)])
    }

    /// Convenience constructor for a square 2-D grid.
    pub fn square(length: f64, points: usize) -> Result<Arc<Grid>> {
        Grid::new(&[(length, points), (length, points)])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    /// Total number of sample points.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume element `dx^n`.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing()).product()
    }

    /// Dual-cell volume `dxi^n = (2 pi / L)^n`.
    pub fn dual_cell_volume(&self) -> f64 {
        self.axes
            .iter()
            .map(|a| 2.0 * std::f64::consts::PI / a.length)
            .product()
    }

    /// Physical coordinates of the flat index `i` (row-major, axis 0 slowest).
    pub fn coords(&self, i: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        let mut rem = i;
        for (d, ax) in self.axes.iter().enumerate() {
            let stride: usize = self.axes[d + 1..].iter().map(|a| a.points).product();
            let idx = rem / stride;
            rem %= stride;
            out.push(ax.coord(idx));
        }
        out
    }

    /// Iterate flat indices together with per-axis sample indices.
    pub fn index_of(&self, multi: &[usize]) -> usize {
        let mut i = 0;
        for (d, &m) in multi.iter().enumerate() {
            let stride: usize = self.axes[d + 1..].iter().map(|a| a.points).product();
            i += m * stride;
        }
        i
    }

    /// All coordinates along one axis, in storage order.
    pub fn axis_coords(&self, d: usize) -> Vec<f64> {
        let ax = &self.axes[d];
        (0..ax.points).map(|m| ax.coord(m)).collect()
    }

    /// All wavenumbers along one axis, in natural FFT bin order.
    pub fn axis_wavenumbers(&self, d: usize) -> Vec<f64> {
        let ax = &self.axes[d];
        (0..ax.points).map(|k| ax.wavenumber(k)).collect()
    }

    /// Resolution check: every axis must resolve `1.5 * max_wavenumber_needed`.
    pub fn check_resolves(&self, max_wavenumber_needed: f64, context: &str) -> Result<()> {
        for ax in &self.axes {
            let available = ax.max_wavenumber();
            let needed = RESOLUTION_MARGIN * max_wavenumber_needed;
            if needed >= available {
                return Err(Error::ResolutionRule {
                    needed,
                    available,
                    context: context.to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Safety margin of the aliasing rule: the spectral band must exceed
/// 1.5x the largest local wavenumber of the sampled data.
pub const RESOLUTION_MARGIN: f64 = 1.5;

/// Smallest admissible power-of-two point count for a box of length `l`
/// holding oscillations up to angular wavenumber `max_wavenumber`.
///
/// The estimate for chirped envelopes is `max|grad phi| / eps + 6 / width`;
/// callers assemble that and pass it here.
pub fn min_points(l: f64, max_wavenumber: f64) -> usize {
    let mut n = 8usize;
    while std::f64::consts::PI * n as f64 / l <= RESOLUTION_MARGIN * max_wavenumber {
        n *= 2;
        if n >= 1 << 26 {
            break;
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_arithmetic() {
        let g = Grid::line(32.0, 4096).unwrap();
        assert_eq!(g.dim(), 1);
        assert!((g.axis(0).spacing() - 32.0 / 4096.0).abs() < 1e-15);
        // dx * N = L exactly
        assert_eq!(g.axis(0).spacing() * 4096.0, 32.0);
        assert_eq!(g.coords(0)[0], -16.0);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(Grid::line(32.0, 4095).is_err());
        assert!(Grid::line(32.0, 4).is_err());
        assert!(Grid::line(-1.0, 64).is_err());
        assert!(Grid::new(&[(1.0, 64), (1.0, 64), (1.0, 64)]).is_err());
    }

    #[test]
    fn two_d_grid_point_count() {
        let g = Grid::new(&[(16.0, 256), (16.0, 256)]).unwrap();
        assert_eq!(g.len(), 65536);
        assert_eq!(g.dim(), 2);
    }

    #[test]
    fn wavenumbers_cover_standard_set() {
        let g = Grid::line(8.0, 16).unwrap();
        let k = g.axis_wavenumbers(0);
        let dxi = 2.0 * std::f64::consts::PI / 8.0;
        assert_eq!(k[0], 0.0);
        assert!((k[1] - dxi).abs() < 1e-15);
        // Nyquist bin sits at the negative end of [-pi N/L, pi N/L).
        assert!((k[8] + 8.0 * dxi).abs() < 1e-15);
        assert!((k[15] + dxi).abs() < 1e-15);
        let max = g.axis(0).max_wavenumber();
        assert!(k.iter().all(|&x| -max <= x && x < max));
    }

    #[test]
    fn min_points_respects_margin() {
        let n = min_points(32.0, 100.0);
        assert!(std::f64::consts::PI * n as f64 / 32.0 > 150.0);
        assert!(std::f64::consts::PI * (n / 2) as f64 / 32.0 <= 150.0);
    }

    #[test]
    fn flat_indexing_row_major() {
        let g = Grid::new(&[(4.0, 8), (2.0, 16)]).unwrap();
        assert_eq!(g.index_of(&[1, 3]), 19);
        let c = g.coords(19);
        assert!((c[0] - g.axis(0).coord(1)).abs() < 1e-15);
        assert!((c[1] - g.axis(1).coord(3)).abs() < 1e-15);
    }
}
