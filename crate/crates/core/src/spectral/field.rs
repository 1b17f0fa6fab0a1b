use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

use super::grid::{Grid, MAX_DIM};
use crate::error::{Error, Result};

macro_rules! field_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name {
            grid: Grid,
            data: Vec<Complex64>,
        }

        impl $name {
            pub fn zeros(grid: Grid) -> Self {
                Self { grid, data: vec![Complex64::new(0.0, 0.0); grid.len()] }
            }

            pub fn from_vec(grid: Grid, data: Vec<Complex64>) -> Result<Self> {
                if data.len() != grid.len() {
                    return Err(Error::GridMismatch(format!(
                        "expected {} values, got {}",
                        grid.len(),
                        data.len()
                    )));
                }
                Ok(Self { grid, data })
            }

            pub fn grid(&self) -> &Grid {
                &self.grid
            }

            pub fn data(&self) -> &[Complex64] {
                &self.data
            }

            pub fn data_mut(&mut self) -> &mut [Complex64] {
                &mut self.data
            }

            pub fn into_data(self) -> Vec<Complex64> {
                self.data
            }

            pub fn scale(&self, a: Complex64) -> Self {
                Self { grid: self.grid, data: self.data.iter().map(|v| v * a).collect() }
            }

            pub fn scale_real(&self, a: f64) -> Self {
                Self { grid: self.grid, data: self.data.iter().map(|v| v * a).collect() }
            }

            /// `self += a * other`.
            pub fn axpy(&mut self, a: Complex64, other: &Self) -> Result<()> {
                self.grid.check_same(&other.grid, "axpy")?;
                for (x, y) in self.data.iter_mut().zip(&other.data) {
                    *x += a * y;
                }
                Ok(())
            }

            pub fn is_finite(&self) -> bool {
                self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
            }

            /// Largest pointwise modulus.
            pub fn max_abs(&self) -> f64 {
                self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }
        }

        impl<'a> Add<&'a $name> for &'a $name {
            type Output = $name;
            fn add(self, rhs: &'a $name) -> $name {
                assert_eq!(self.grid, rhs.grid, "adding fields on different grids");
                $name {
                    grid: self.grid,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
                }
            }
        }

        impl<'a> Sub<&'a $name> for &'a $name {
            type Output = $name;
            fn sub(self, rhs: &'a $name) -> $name {
                assert_eq!(self.grid, rhs.grid, "subtracting fields on different grids");
                $name {
                    grid: self.grid,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
                }
            }
        }

        impl Mul<Complex64> for &$name {
            type Output = $name;
            fn mul(self, rhs: Complex64) -> $name {
                self.scale(rhs)
            }
        }

        impl Neg for &$name {
            type Output = $name;
            fn neg(self) -> $name {
                self.scale_real(-1.0)
            }
        }
    };
}

field_type!(
    /// Grid values `f(x_j)` in physical representation.
    PhysicalField
);

field_type!(
    /// Fourier coefficients `f^(xi_k)` in storage (FFT) order.
    SpectralField
);

impl PhysicalField {
    /// Sample `f` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64; MAX_DIM]) -> Complex64) -> Self {
        let data = (0..grid.len()).map(|i| f(&grid.position(i))).collect();
        Self { grid, data }
    }

    /// Riemann-sum `L^r` norm with cell weight `h^d`; `r = inf` gives the max.
    pub fn lp_norm(&self, r: f64) -> f64 {
        lp_of(self.data.iter().map(|v| v.norm()), r, self.grid.cell_volume())
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0)
    }
}

impl SpectralField {
    /// Evaluate `f^(xi)` at every lattice mode.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64; MAX_DIM]) -> Complex64) -> Self {
        let data = (0..grid.len()).map(|i| f(&grid.wavevector(i))).collect();
        Self { grid, data }
    }

    /// Plane wave `e^{i k.x}` of unit amplitude, expressed spectrally.
    pub fn plane_wave(grid: Grid, k: &[i64; MAX_DIM]) -> Result<Self> {
        let flat = grid.flat_of_mode(k).ok_or_else(|| {
            Error::param("k", format!("mode {k:?} is not on the lattice"))
        })?;
        let mut out = Self::zeros(grid);
        // e^{ik.x} has unit modulus, so its L^2 norm is (2L)^{d/2}; the
        // coefficient below makes the inverse transform reproduce it exactly.
        let c = (2.0 * std::f64::consts::PI).powf(grid.dim() as f64 / 2.0) / grid.mode_volume();
        out.data[flat] = Complex64::new(c, 0.0);
        Ok(out)
    }

    /// `(sum |f^|^2 (pi/L)^d)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.data.iter().map(|v| v.norm_sqr()).sum();
        (sum * self.grid.mode_volume()).sqrt()
    }

    /// Spectral inner product `sum f^ conj(g^) (pi/L)^d`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.grid.check_same(&other.grid, "inner product")?;
        let s: Complex64 = self.data.iter().zip(&other.data).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.mode_volume())
    }
}

/// Weighted `l^r` of nonnegative values, scaled by the max to avoid overflow.
pub(crate) fn lp_of(values: impl Iterator<Item = f64> + Clone, r: f64, weight: f64) -> f64 {
    let max = values.clone().fold(0.0, f64::max);
    if r.is_infinite() {
        return max;
    }
    if max == 0.0 {
        return 0.0;
    }
    let sum: f64 = if r == 2.0 {
        values.map(|v| (v / max) * (v / max)).sum()
    } else {
        values.map(|v| (v / max).powf(r)).sum()
    };
    max * (sum * weight).powf(1.0 / r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_of_matches_direct_sum() {
        let v = [1.0, 2.0, 3.0];
        let direct = (1.0f64 + 8.0 + 27.0).powf(1.0 / 3.0);
        assert!((lp_of(v.iter().copied(), 3.0, 1.0) - direct).abs() < 1e-12);
        assert_eq!(lp_of(v.iter().copied(), f64::INFINITY, 1.0), 3.0);
        assert_eq!(lp_of([0.0, 0.0].iter().copied(), 4.0, 1.0), 0.0);
    }

    #[test]
    fn huge_exponent_does_not_overflow() {
        let v = [1e10, 2e10];
        let got = lp_of(v.iter().copied(), 100.0, 1.0);
        assert!(got.is_finite());
        assert!(got >= 2e10 && got < 2.1e10);
    }
}
