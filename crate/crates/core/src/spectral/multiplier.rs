use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use super::field::SpectralField;
use super::grid::{Grid, Lattice};
use crate::error::{Error, Result};

/// Which first-order derivative the nonlinearity uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Derivative {
    /// `d/dx_j` (zero-based axis), symbol `i xi_j`.
    Coordinate(usize),
    /// `|grad|`, symbol `|xi|`.
    Radial,
}

/// Sign convention of the linear propagator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseSign {
    /// `S(t) = e^{-i t |xi|^4}`.
    #[default]
    Negative,
    /// `S(t) = e^{+i t |xi|^4}`.
    Positive,
}

impl PhaseSign {
    pub fn as_f64(self) -> f64 {
        match self {
            PhaseSign::Negative => -1.0,
            PhaseSign::Positive => 1.0,
        }
    }
}

/// A diagonal Fourier multiplier.
#[derive(Clone, Debug, PartialEq)]
pub enum Multiplier {
    /// `|xi|^s`. The zero mode maps to 0 unless `s == 0`.
    Homogeneous(f64),
    /// `<xi>^s = (1 + |xi|^2)^{s/2}`.
    Bessel(f64),
    Derivative(Derivative),
    /// `e^{+- i t |xi|^4}`.
    Phase { t: f64, sign: PhaseSign },
    /// 1 on the listed lattice modes, 0 elsewhere.
    Indicator(BTreeSet<Lattice>),
}

impl Multiplier {
    pub fn phase(t: f64) -> Self {
        Multiplier::Phase {
            t,
            sign: PhaseSign::Negative,
        }
    }

    /// Symbol at the mode stored at `flat`.
    pub fn symbol(&self, grid: &Grid, flat: usize) -> Complex64 {
        let xi = grid.wavevector(flat);
        let xi2: f64 = xi.iter().map(|x| x * x).sum();
        match self {
            Multiplier::Homogeneous(s) => Complex64::new(homogeneous(xi2, *s), 0.0),
            Multiplier::Bessel(s) => Complex64::new(bessel(xi2, *s), 0.0),
            Multiplier::Derivative(Derivative::Coordinate(j)) => {
                let idx = grid.axis_indices(flat);
                if idx[*j] == grid.n() / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, xi[*j])
                }
            }
            Multiplier::Derivative(Derivative::Radial) => {
                if grid.touches_nyquist(flat) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(xi2.sqrt(), 0.0)
                }
            }
            Multiplier::Phase { t, sign } => Complex64::cis(sign.as_f64() * t * xi2 * xi2),
            Multiplier::Indicator(set) => {
                if set.contains(&grid.lattice(flat)) {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }

    /// Symbol table over the whole lattice in storage order.
    pub fn table(&self, grid: &Grid) -> Result<Vec<Complex64>> {
        if let Multiplier::Derivative(Derivative::Coordinate(j)) = self {
            if *j >= grid.dim() {
                return Err(Error::param(
                    "derivative axis",
                    format!("axis {j} out of range for d = {}", grid.dim()),
                ));
            }
        }
        Ok((0..grid.len()).map(|i| self.symbol(grid, i)).collect())
    }
}

pub(crate) fn homogeneous(xi2: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if xi2 == 0.0 {
        0.0
    } else {
        xi2.powf(s / 2.0)
    }
}

pub(crate) fn bessel(xi2: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        (1.0 + xi2).powf(s / 2.0)
    }
}

/// Pointwise product of `f` with the multiplier symbol.
pub fn apply_multiplier(f: &SpectralField, m: &Multiplier) -> Result<SpectralField> {
    let table = m.table(f.grid())?;
    let data: Vec<Complex64> = f.data().iter().zip(&table).map(|(a, b)| a * b).collect();
    let out = SpectralField::from_vec(*f.grid(), data)?;
    if !out.is_finite() {
        return Err(Error::NonFinite(format!("multiplier {m:?}")));
    }
    Ok(out)
}

/// Pointwise product with a precomputed real table.
pub(crate) fn apply_real_table(f: &SpectralField, table: &[f64]) -> SpectralField {
    let data = f.data().iter().zip(table).map(|(a, b)| a * b).collect();
    SpectralField::from_vec(*f.grid(), data).expect("table matches grid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_on_plane_wave() {
        let grid = Grid::new(3, 8, std::f64::consts::PI).unwrap();
        let f = SpectralField::plane_wave(grid, &[2, 0, 0, 0]).unwrap();
        let g = apply_multiplier(&f, &Multiplier::Bessel(1.0)).unwrap();
        let ratio = g.l2_norm() / f.l2_norm();
        assert!((ratio - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn derivative_of_plane_wave() {
        let grid = Grid::new(3, 8, std::f64::consts::PI).unwrap();
        let f = SpectralField::plane_wave(grid, &[1, 0, 0, 0]).unwrap();
        let g = apply_multiplier(&f, &Multiplier::Derivative(Derivative::Coordinate(0))).unwrap();
        let expect = f.scale(Complex64::new(0.0, 1.0));
        assert!((&g - &expect).l2_norm() < 1e-12 * f.l2_norm());
    }

    #[test]
    fn derivative_zeroes_nyquist() {
        let grid = Grid::new(1, 8, 1.0).unwrap();
        let f = SpectralField::plane_wave(grid, &[-4, 0, 0, 0]).unwrap();
        for m in [Derivative::Coordinate(0), Derivative::Radial] {
            let g = apply_multiplier(&f, &Multiplier::Derivative(m)).unwrap();
            assert_eq!(g.l2_norm(), 0.0);
        }
    }

    #[test]
    fn negative_power_kills_zero_mode() {
        let grid = Grid::new(2, 8, 1.0).unwrap();
        let f = SpectralField::plane_wave(grid, &[0, 0, 0, 0]).unwrap();
        let g = apply_multiplier(&f, &Multiplier::Homogeneous(-0.5)).unwrap();
        assert_eq!(g.l2_norm(), 0.0);
    }

    #[test]
    fn overflow_is_reported() {
        let grid = Grid::new(1, 8, 1e-3).unwrap();
        let f = SpectralField::plane_wave(grid, &[3, 0, 0, 0]).unwrap();
        assert!(matches!(
            apply_multiplier(&f, &Multiplier::Homogeneous(400.0)),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn bad_axis_rejected() {
        let grid = Grid::new(2, 8, 1.0).unwrap();
        let f = SpectralField::zeros(grid);
        assert!(apply_multiplier(&f, &Multiplier::Derivative(Derivative::Coordinate(2))).is_err());
    }
}
