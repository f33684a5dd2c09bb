use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Periodic square `[-L/2, L/2)²` sampled with `N_g` points per axis.
///
/// Physical coordinates are `x_i = (i - N_g/2)·h` with `h = L/N_g`, so the
/// origin is a grid node. Wavenumbers are `ξ = 2π·k/L` for the signed index
/// `k ∈ {-N_g/2, …, N_g/2 - 1}`; arrays in spectral space use FFT order
/// (`0, 1, …, N_g/2 - 1, -N_g/2, …, -1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid2D {
    #[serde(rename = "N_g")]
    points_per_axis: usize,
    #[serde(rename = "L")]
    side_length: f64,
}

impl Grid2D {
    pub const DEFAULT_POINTS: usize = 256;
    pub const DEFAULT_SIDE: f64 = 16.0 * PI;

    pub fn new(points_per_axis: usize, side_length: f64) -> Result<Self> {
        if points_per_axis < 8 || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {points_per_axis}"
            )));
        }
        if !(side_length.is_finite() && side_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "side length must be positive and finite, got {side_length}"
            )));
        }
        Ok(Self {
            points_per_axis,
            side_length,
        })
    }

    /// The default domain: `L = 16π`, `N_g = 256`.
    pub fn default_domain() -> Self {
        Self::new(Self::DEFAULT_POINTS, Self::DEFAULT_SIDE).expect("default grid is valid")
    }

    /// Re-validates a grid obtained through deserialization.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.points_per_axis, self.side_length)
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    /// `L / N_g`; exact because `N_g` is a power of two.
    pub fn spacing(&self) -> f64 {
        self.side_length / self.points_per_axis as f64
    }

    /// Riemann weight `h²` of one grid cell.
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    pub fn len(&self) -> usize {
        self.points_per_axis * self.points_per_axis
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest representable per-axis wavenumber magnitude, `π·N_g/L`.
    pub fn nyquist(&self) -> f64 {
        PI * self.points_per_axis as f64 / self.side_length
    }

    /// Spacing between consecutive wavenumbers, `2π/L`.
    pub fn wavenumber_step(&self) -> f64 {
        2.0 * PI / self.side_length
    }

    pub fn coordinate(&self, index: usize) -> f64 {
        (index as f64 - (self.points_per_axis / 2) as f64) * self.spacing()
    }

    /// Signed wavenumber index of FFT slot `slot`.
    pub fn signed_index(&self, slot: usize) -> i64 {
        let n = self.points_per_axis;
        if slot < n / 2 {
            slot as i64
        } else {
            slot as i64 - n as i64
        }
    }

    /// FFT slot holding the signed index `k`, if it is on the grid.
    pub fn slot_of(&self, k: i64) -> Option<usize> {
        let half = (self.points_per_axis / 2) as i64;
        if k < -half || k >= half {
            return None;
        }
        Some(if k >= 0 {
            k as usize
        } else {
            (k + self.points_per_axis as i64) as usize
        })
    }

    /// Physical wavenumber of FFT slot `slot`.
    pub fn wavenumber(&self, slot: usize) -> f64 {
        self.signed_index(slot) as f64 * self.wavenumber_step()
    }

    /// Wavenumbers in ascending order `-N_g/2 … N_g/2 - 1`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let half = (self.points_per_axis / 2) as i64;
        (-half..half)
            .map(|k| k as f64 * self.wavenumber_step())
            .collect()
    }

    /// Wavenumbers in FFT slot order.
    pub fn wavenumbers_fft_order(&self) -> Vec<f64> {
        (0..self.points_per_axis)
            .map(|s| self.wavenumber(s))
            .collect()
    }

    /// Row-major flat index of node `(i, j)` (`i` along x₁, `j` along x₂).
    pub fn flat(&self, i: usize, j: usize) -> usize {
        i * self.points_per_axis + j
    }

    /// Grid node nearest to the physical point, if it lies inside the domain.
    pub fn node_near(&self, x1: f64, x2: f64) -> Option<(usize, usize)> {
        let h = self.spacing();
        let half = (self.points_per_axis / 2) as f64;
        let i = (x1 / h + half).round();
        let j = (x2 / h + half).round();
        let max = self.points_per_axis as f64;
        if i < 0.0 || j < 0.0 || i >= max || j >= max {
            return None;
        }
        Some((i as usize, j as usize))
    }

    /// Grid nodes with `r_min < |x| <= r_max`.
    pub fn annulus_nodes(&self, r_min: f64, r_max: f64) -> Vec<(usize, usize)> {
        let n = self.points_per_axis;
        let mut nodes = Vec::new();
        for i in 0..n {
            let x1 = self.coordinate(i);
            for j in 0..n {
                let x2 = self.coordinate(j);
                let r = x1.hypot(x2);
                if r > r_min && r <= r_max {
                    nodes.push((i, j));
                }
            }
        }
        nodes
    }

    /// The grid with the same resolution on a domain shrunk by `factor`.
    pub fn shrunk(&self, factor: f64) -> Result<Self> {
        Self::new(self.points_per_axis, self.side_length / factor)
    }
}

impl Default for Grid2D {
    fn default() -> Self {
        Self::default_domain()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid2D::new(4, 1.0).is_err());
        assert!(Grid2D::new(96, 1.0).is_err());
        assert!(Grid2D::new(64, 0.0).is_err());
        assert!(Grid2D::new(64, f64::NAN).is_err());
    }

    #[test]
    fn spacing_times_points_is_side() {
        for &n in &[8usize, 64, 256, 1024] {
            let g = Grid2D::new(n, 16.0 * PI).unwrap();
            assert_eq!(g.spacing() * n as f64, g.side_length());
        }
    }

    #[test]
    fn wavenumbers_symmetric_except_nyquist() {
        let g = Grid2D::new(16, 2.0 * PI).unwrap();
        let ks = g.wavenumbers();
        assert_eq!(ks[0], -8.0);
        let unpaired: Vec<f64> = ks
            .iter()
            .copied()
            .filter(|k| !ks.iter().any(|m| *m == -*k))
            .collect();
        assert_eq!(unpaired, vec![-8.0]);
        for s in 0..16 {
            assert_eq!(g.slot_of(g.signed_index(s)), Some(s));
        }
        assert_eq!(g.slot_of(8), None);
    }

    #[test]
    fn origin_is_a_node() {
        let g = Grid2D::default_domain();
        assert_eq!(g.coordinate(128), 0.0);
        assert_eq!(g.node_near(0.0, 0.0), Some((128, 128)));
        assert_eq!(g.nyquist(), 16.0);
    }
}
