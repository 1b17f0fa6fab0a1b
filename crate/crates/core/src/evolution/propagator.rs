use num_complex::Complex64;

use crate::error::Result;
use crate::norms::Trajectory;
use crate::spectral::{Grid, PhaseSign, SpectralField};

/// The free group `S(t)`, multiplier `e^{∓ i t |xi|^4}`.
#[derive(Clone, Debug)]
pub struct Propagator {
    grid: Grid,
    sign: PhaseSign,
    xi4: Vec<f64>,
}

impl Propagator {
    pub fn new(grid: Grid, sign: PhaseSign) -> Self {
        let xi4 = grid.xi_squared_table().into_iter().map(|x| x * x).collect();
        Self { grid, sign, xi4 }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn sign(&self) -> PhaseSign {
        self.sign
    }

    /// Symbol of `S(t)` at every mode.
    pub fn phases(&self, t: f64) -> Vec<Complex64> {
        let a = self.sign.as_f64() * t;
        self.xi4.iter().map(|&x| Complex64::cis(a * x)).collect()
    }

    pub fn apply(&self, f: &SpectralField, t: f64) -> Result<SpectralField> {
        self.grid.check_same(f.grid(), "propagate")?;
        let data = f.data().iter().zip(self.phases(t)).map(|(a, b)| a * b).collect();
        SpectralField::from_vec(self.grid, data)
    }

    /// `z(t_m) = S(t_m) phi` for `t_m = t0 + m dt`, `m = 0..=steps`.
    pub fn linear_trajectory(&self, phi: &SpectralField, t0: f64, dt: f64, steps: usize) -> Result<Trajectory> {
        let fields = (0..=steps)
            .map(|m| self.apply(phi, t0 + m as f64 * dt))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(self.grid, t0, dt, fields)
    }
}

/// `S(t) f` with the default sign.
pub fn propagate(f: &SpectralField, t: f64) -> SpectralField {
    Propagator::new(*f.grid(), PhaseSign::Negative)
        .apply(f, t)
        .expect("same grid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_phase() {
        let grid = Grid::new(2, 8, std::f64::consts::PI).unwrap();
        let f = SpectralField::plane_wave(grid, &[1, 2, 0, 0]).unwrap();
        let t = 0.3;
        let g = propagate(&f, t);
        let xi4 = (1.0f64 + 4.0).powi(2);
        let expect = f.scale(Complex64::cis(-t * xi4));
        assert!((&g - &expect).l2_norm() < 1e-12 * f.l2_norm());
    }
}
