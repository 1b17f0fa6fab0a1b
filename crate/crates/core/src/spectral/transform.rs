use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

use super::field::{PhysicalField, SpectralField};
use super::grid::Grid;
use crate::error::Result;

/// Continuum-normalized Fourier transform on a [`Grid`].
///
/// Forward: `f^(xi_k) = (2 pi)^{-d/2} h^d sum_j f(x_j) e^{-i xi_k . x_j}`.
/// Inverse: `f(x_j) = (2 pi)^{-d/2} (pi/L)^d sum_k f^(xi_k) e^{i xi_k . x_j}`.
///
/// With these weights Plancherel reads `sum |f|^2 h^d = sum |f^|^2 (pi/L)^d`.
/// The plan is immutable and may be shared across threads.
#[derive(Clone)]
pub struct FourierTransform {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    forward_scale: f64,
    inverse_scale: f64,
}

impl std::fmt::Debug for FourierTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierTransform").field("grid", &self.grid).finish()
    }
}

impl FourierTransform {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n());
        let inverse = planner.plan_fft_inverse(grid.n());
        let norm = (2.0 * PI).powf(-(grid.dim() as f64) / 2.0);
        Self {
            grid,
            forward,
            inverse,
            forward_scale: norm * grid.cell_volume(),
            inverse_scale: norm * grid.mode_volume(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn forward(&self, f: &PhysicalField) -> Result<SpectralField> {
        self.grid.check_same(f.grid(), "forward transform")?;
        let mut data = f.data().to_vec();
        self.forward_in_place(&mut data);
        SpectralField::from_vec(self.grid, data)
    }

    pub fn inverse(&self, f: &SpectralField) -> Result<PhysicalField> {
        self.grid.check_same(f.grid(), "inverse transform")?;
        let mut data = f.data().to_vec();
        self.inverse_in_place(&mut data);
        PhysicalField::from_vec(self.grid, data)
    }

    /// Physical values to spectral coefficients, in place.
    pub fn forward_in_place(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.grid.len());
        self.transform_axes(data, &self.forward);
        self.twiddle(data, self.forward_scale);
    }

    /// Spectral coefficients to physical values, in place.
    pub fn inverse_in_place(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.grid.len());
        self.twiddle(data, self.inverse_scale);
        self.transform_axes(data, &self.inverse);
    }

    // Grid points start at -L rather than 0, which multiplies mode k by
    // (-1)^{k_1 + ... + k_d}. Parity of k matches parity of its storage index.
    fn twiddle(&self, data: &mut [Complex64], scale: f64) {
        let n = self.grid.n();
        let d = self.grid.dim();
        for (flat, v) in data.iter_mut().enumerate() {
            let mut rest = flat;
            let mut parity = 0;
            for _ in 0..d {
                parity += rest % n;
                rest /= n;
            }
            *v *= if parity % 2 == 0 { scale } else { -scale };
        }
    }

    fn transform_axes(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n();
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        // Axis 1 is contiguous.
        fft.process_with_scratch(data, &mut scratch);
        let mut stride = n;
        let mut buf = Vec::new();
        for _ in 1..self.grid.dim() {
            let block = stride * n;
            buf.resize(block, Complex64::new(0.0, 0.0));
            for chunk in data.chunks_exact_mut(block) {
                // Gather lines along this axis into contiguous rows, transform, scatter back.
                for o in 0..stride {
                    for i in 0..n {
                        buf[o * n + i] = chunk[o + i * stride];
                    }
                }
                fft.process_with_scratch(&mut buf, &mut scratch);
                for o in 0..stride {
                    for i in 0..n {
                        chunk[o + i * stride] = buf[o * n + i];
                    }
                }
            }
            stride = block;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::MAX_DIM;

    fn direct_dft(grid: &Grid, f: &PhysicalField) -> Vec<Complex64> {
        let norm = (2.0 * PI).powf(-(grid.dim() as f64) / 2.0) * grid.cell_volume();
        (0..grid.len())
            .map(|k| {
                let xi = grid.wavevector(k);
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..grid.len() {
                    let x = grid.position(j);
                    let phase: f64 = (0..MAX_DIM).map(|a| xi[a] * x[a]).sum();
                    acc += f.data()[j] * Complex64::from_polar(1.0, -phase);
                }
                acc * norm
            })
            .collect()
    }

    #[test]
    fn matches_direct_sum_in_two_dimensions() {
        let grid = Grid::new(2, 8, 1.7).unwrap();
        let f = PhysicalField::from_fn(grid, |x| {
            Complex64::new((x[0] * 1.3).sin() + x[1], (x[0] * x[1]).cos())
        });
        let plan = FourierTransform::new(grid);
        let fast = plan.forward(&f).unwrap();
        let slow = direct_dft(&grid, &f);
        for (a, b) in fast.data().iter().zip(&slow) {
            assert!((a - b).norm() < 1e-11, "{a} vs {b}");
        }
    }

    #[test]
    fn plane_wave_round_trip() {
        let grid = Grid::new(3, 8, 2.0).unwrap();
        let k = [1, -2, 3, 0];
        let wave = SpectralField::plane_wave(grid, &k).unwrap();
        let plan = FourierTransform::new(grid);
        let phys = plan.inverse(&wave).unwrap();
        let dk = grid.frequency_spacing();
        for j in [0, 17, 300, 511] {
            let x = grid.position(j);
            let phase = dk * (x[0] * 1.0 - 2.0 * x[1] + 3.0 * x[2]);
            let expect = Complex64::from_polar(1.0, phase);
            assert!((phys.data()[j] - expect).norm() < 1e-12);
        }
    }
}
