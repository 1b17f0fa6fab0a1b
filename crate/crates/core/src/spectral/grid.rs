use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 4;

/// Signed lattice coordinates; axes beyond the grid dimension are zero.
pub type Lattice = [i64; MAX_DIM];

/// A periodic box `[-L, L)^d` sampled with `n` points per axis.
///
/// Flat indices run with axis 1 fastest: `flat = i_1 + n i_2 + n^2 i_3 + ...`.
/// In spectral representation the per-axis index `i` stores the signed mode
/// `k = i` for `i < n/2` and `k = i - n` otherwise, so `k = -n/2` is the single
/// (unpaired) Nyquist mode. Frequencies are `xi = (pi / L) k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n: usize,
    half_width: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, half_width: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidGrid(format!(
                "dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {n}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half-width must be positive, got {half_width}"
            )));
        }
        Ok(Self { dim, n, half_width })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Number of grid points (and of lattice modes), `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical spacing `h = 2L / n`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Frequency spacing `pi / L`.
    pub fn frequency_spacing(&self) -> f64 {
        PI / self.half_width
    }

    /// `h^d`, the quadrature weight of one physical cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// `(pi / L)^d`, the quadrature weight of one lattice mode.
    pub fn mode_volume(&self) -> f64 {
        self.frequency_spacing().powi(self.dim as i32)
    }

    /// Signed mode number stored at per-axis index `i`.
    pub fn signed_mode(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Per-axis storage index holding signed mode `k`, if it is on the lattice.
    pub fn storage_index(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k < -half || k >= half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.n as i64) as usize)
        }
    }

    /// Per-axis storage indices of a flat index.
    pub fn axis_indices(&self, flat: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        let mut rest = flat;
        for slot in out.iter_mut().take(self.dim) {
            *slot = rest % self.n;
            rest /= self.n;
        }
        out
    }

    /// Signed lattice coordinates of the mode stored at `flat`.
    pub fn lattice(&self, flat: usize) -> Lattice {
        let idx = self.axis_indices(flat);
        let mut k = [0; MAX_DIM];
        for j in 0..self.dim {
            k[j] = self.signed_mode(idx[j]);
        }
        k
    }

    /// Flat index of the mode with signed coordinates `k`, if on the lattice.
    pub fn flat_of_mode(&self, k: &Lattice) -> Option<usize> {
        let mut flat = 0;
        let mut stride = 1;
        for &kj in k.iter().take(self.dim) {
            flat += self.storage_index(kj)? * stride;
            stride *= self.n;
        }
        Some(flat)
    }

    /// Frequencies `xi_k` for each per-axis storage index.
    pub fn axis_frequencies(&self) -> Vec<f64> {
        let dk = self.frequency_spacing();
        (0..self.n).map(|i| dk * self.signed_mode(i) as f64).collect()
    }

    /// Physical coordinates `x_j = -L + j h` for each per-axis index.
    pub fn axis_positions(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n)
            .map(|j| -self.half_width + j as f64 * h)
            .collect()
    }

    pub fn wavevector(&self, flat: usize) -> [f64; MAX_DIM] {
        let k = self.lattice(flat);
        let dk = self.frequency_spacing();
        let mut xi = [0.0; MAX_DIM];
        for j in 0..self.dim {
            xi[j] = dk * k[j] as f64;
        }
        xi
    }

    pub fn position(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.axis_indices(flat);
        let h = self.spacing();
        let mut x = [0.0; MAX_DIM];
        for j in 0..self.dim {
            x[j] = -self.half_width + idx[j] as f64 * h;
        }
        x
    }

    /// `|xi|^2` for every mode in storage order.
    pub fn xi_squared_table(&self) -> Vec<f64> {
        let axis: Vec<f64> = self.axis_frequencies().iter().map(|x| x * x).collect();
        self.separable_sum(&axis)
    }

    /// Evaluate `sum_j a[i_j]` over the grid in storage order.
    pub(crate) fn separable_sum(&self, axis: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0];
        for _ in 0..self.dim {
            let mut next = Vec::with_capacity(out.len() * self.n);
            // axis 1 fastest: each new axis becomes the slowest one.
            for &a in axis {
                next.extend(out.iter().map(|&b| b + a));
            }
            out = next;
        }
        out
    }

    /// Evaluate `prod_j a[i_j]` over the grid in storage order.
    pub(crate) fn separable_product(&self, axis: &[f64]) -> Vec<f64> {
        let mut out = vec![1.0];
        for _ in 0..self.dim {
            let mut next = Vec::with_capacity(out.len() * self.n);
            for &a in axis {
                next.extend(out.iter().map(|&b| b * a));
            }
            out = next;
        }
        out
    }

    /// True when any axis index of `flat` sits on the unpaired Nyquist mode.
    pub fn touches_nyquist(&self, flat: usize) -> bool {
        let idx = self.axis_indices(flat);
        idx.iter().take(self.dim).any(|&i| i == self.n / 2)
    }

    /// Largest `|xi|` on the lattice (the corner mode).
    pub fn max_frequency(&self) -> f64 {
        self.frequency_spacing() * (self.n / 2) as f64 * (self.dim as f64).sqrt()
    }

    /// Same box with `n` replaced.
    pub fn with_points(&self, n: usize) -> Result<Grid> {
        Grid::new(self.dim, n, self.half_width)
    }

    pub(crate) fn check_same(&self, other: &Grid, what: &str) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "{what}: {self:?} vs {other:?}"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_lattice() {
        let g = Grid::new(1, 8, PI).unwrap();
        let xi: Vec<f64> = g.axis_frequencies();
        let mut sorted = xi.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected: Vec<f64> = (-4..4).map(|k| k as f64).collect();
        for (a, b) in sorted.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((g.spacing() - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn three_dimensional_counts() {
        let g = Grid::new(3, 32, 16.0).unwrap();
        assert_eq!(g.len(), 32768);
        assert!((g.frequency_spacing() - PI / 16.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(3, 33, 16.0).is_err());
        assert!(Grid::new(5, 8, 1.0).is_err());
        assert!(Grid::new(2, 4, 1.0).is_err());
        assert!(Grid::new(2, 8, 0.0).is_err());
    }

    #[test]
    fn flat_and_lattice_agree() {
        let g = Grid::new(3, 8, 1.0).unwrap();
        for flat in 0..g.len() {
            let k = g.lattice(flat);
            assert_eq!(g.flat_of_mode(&k), Some(flat));
        }
        let table = g.xi_squared_table();
        for flat in [0, 1, 9, 100, 511] {
            let xi = g.wavevector(flat);
            let direct: f64 = xi.iter().map(|x| x * x).sum();
            assert!((table[flat] - direct).abs() < 1e-12);
        }
    }
}
