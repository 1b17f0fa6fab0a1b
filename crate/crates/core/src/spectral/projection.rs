use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use super::grid::{Grid, Lattice};
use super::multiplier::apply_real_table;
use crate::error::{Error, Result};
use crate::randomization::partition::{PartitionFunction, Smoothstep};

/// `F^{-1}[psi(xi - mu n) F f]` for one cube label `n`.
pub fn cube_project(
    f: &SpectralField,
    cube: &Lattice,
    psi: &PartitionFunction,
) -> Result<SpectralField> {
    let grid = f.grid();
    if grid.dim() != psi.dim() {
        return Err(Error::GridMismatch(format!(
            "partition has d = {}, field has d = {}",
            psi.dim(),
            grid.dim()
        )));
    }
    let table: Vec<f64> = (0..grid.len())
        .map(|i| psi.cube_weight(&grid.wavevector(i), cube))
        .collect();
    Ok(apply_real_table(f, &table))
}

/// Smooth Littlewood-Paley partition.
///
/// `chi(r) = 1` for `r <= 1`, `eta(r - 1)` on `[1, 2]`, `0` beyond.
/// `P_1 = chi(|xi|)` and `P_N = chi(|xi|/N) - chi(2|xi|/N)` for `N >= 2`, so
/// `P_N` lives on `N/2 < |xi| < 2N` and the symbols telescope to one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicPartition {
    generator: Smoothstep,
}

impl Default for DyadicPartition {
    fn default() -> Self {
        Self::new(3).expect("order 3 is valid")
    }
}

impl DyadicPartition {
    pub fn new(order: u32) -> Result<Self> {
        Ok(Self {
            generator: Smoothstep::new(order)?,
        })
    }

    fn chi(&self, r: f64) -> f64 {
        if r <= 1.0 {
            1.0
        } else {
            self.generator.eta(r - 1.0)
        }
    }

    /// Symbol of `P_N` at radius `|xi|`.
    pub fn symbol(&self, band: u64, radius: f64) -> f64 {
        let n = band as f64;
        if band == 1 {
            self.chi(radius)
        } else {
            self.chi(radius / n) - self.chi(2.0 * radius / n)
        }
    }

    /// Dyadic bands `1, 2, 4, ...` up to the first that covers the lattice.
    pub fn bands(&self, grid: &Grid) -> Vec<u64> {
        let max = grid.max_frequency();
        let mut out = vec![1u64];
        while (*out.last().unwrap() as f64) < max {
            out.push(out.last().unwrap() * 2);
        }
        out
    }

    pub fn project(&self, f: &SpectralField, band: u64) -> Result<SpectralField> {
        if band == 0 || !band.is_power_of_two() {
            return Err(Error::param("N", format!("{band} is not a dyadic integer")));
        }
        let table: Vec<f64> = f
            .grid()
            .xi_squared_table()
            .into_iter()
            .map(|x2| self.symbol(band, x2.sqrt()))
            .collect();
        Ok(apply_real_table(f, &table))
    }
}

/// `P_N f` with the default C^2 dyadic partition.
pub fn dyadic_project(f: &SpectralField, band: u64) -> Result<SpectralField> {
    DyadicPartition::default().project(f, band)
}

/// Keep modes with every `|k_j| < n/4`; zero the rest.
///
/// Products of three fields filtered this way alias only into the discarded
/// band, so `dealias(|u|^2 u)` is the exact truncated convolution.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let table = dealias_mask(f.grid());
    apply_real_table(f, &table)
}

pub(crate) fn dealias_mask(grid: &Grid) -> Vec<f64> {
    let quarter = (grid.n() / 4) as i64;
    let axis: Vec<f64> = (0..grid.n())
        .map(|i| if grid.signed_mode(i).abs() < quarter { 1.0 } else { 0.0 })
        .collect();
    grid.separable_product(&axis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_three_hits_two_bands() {
        let p = DyadicPartition::default();
        let hits: Vec<u64> = [1u64, 2, 4, 8, 16]
            .into_iter()
            .filter(|&n| p.symbol(n, 3.0) != 0.0)
            .collect();
        assert_eq!(hits, vec![2, 4]);
        // At r = 3 the N=2 band is eta(3/2 - 1) = eta(1/2) = 1/2.
        assert!((p.symbol(2, 3.0) - 0.5).abs() < 1e-15);
        assert!((p.symbol(4, 3.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn symbols_telescope() {
        let p = DyadicPartition::default();
        for i in 0..400 {
            let r = i as f64 * 0.173;
            let total: f64 = (0..12).map(|j| p.symbol(1 << j, r)).sum();
            assert!((total - 1.0).abs() < 1e-14, "r = {r}");
        }
    }

    #[test]
    fn dealias_mask_keeps_inner_quarter() {
        let grid = Grid::new(1, 16, 1.0).unwrap();
        let mask = dealias_mask(&grid);
        let kept: Vec<i64> = (0..16)
            .filter(|&i| mask[i] == 1.0)
            .map(|i| grid.signed_mode(i))
            .collect();
        assert_eq!(kept, vec![0, 1, 2, 3, -3, -2, -1]);
    }
}
