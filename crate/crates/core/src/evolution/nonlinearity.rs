use num_complex::Complex64;

use super::config::NonlinearSign;
use crate::error::{Error, Result};
use crate::spectral::{dealias_mask, Derivative, FourierTransform, Grid, Multiplier, SpectralField};

/// `F(u) = ± ∂(|u|^2 u)`, evaluated pseudo-spectrally with the cubic
/// truncation applied to both the input and the output.
#[derive(Clone)]
pub struct Nonlinearity {
    plan: FourierTransform,
    mask: Vec<f64>,
    output: Vec<Complex64>,
}

impl Nonlinearity {
    pub fn new(grid: Grid, derivative: Derivative, sign: NonlinearSign) -> Result<Self> {
        let mask = dealias_mask(&grid);
        let deriv = Multiplier::Derivative(derivative).table(&grid)?;
        let output = deriv
            .iter()
            .zip(&mask)
            .map(|(d, m)| d * (m * sign.as_f64()))
            .collect();
        Ok(Self {
            plan: FourierTransform::new(grid),
            mask,
            output,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.plan.grid()
    }

    /// Indicator of the retained band, in storage order.
    pub fn mask(&self) -> &[f64] {
        &self.mask
    }

    /// Writes `F(u)` into `out`; both slices are spectral coefficients.
    pub fn eval_into(&self, u: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        for ((o, v), m) in out.iter_mut().zip(u).zip(&self.mask) {
            *o = v * m;
        }
        self.plan.inverse_in_place(out);
        for v in out.iter_mut() {
            *v *= v.norm_sqr();
        }
        self.plan.forward_in_place(out);
        let mut finite = true;
        for (o, m) in out.iter_mut().zip(&self.output) {
            *o *= m;
            finite &= o.is_finite();
        }
        if finite {
            Ok(())
        } else {
            Err(Error::NonFinite("nonlinearity".into()))
        }
    }

    pub fn eval(&self, u: &SpectralField) -> Result<SpectralField> {
        self.grid().check_same(u.grid(), "nonlinearity")?;
        let mut out = vec![Complex64::new(0.0, 0.0); u.data().len()];
        self.eval_into(u.data(), &mut out)?;
        SpectralField::from_vec(*u.grid(), out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_wave_derivative() {
        let grid = Grid::new(1, 16, std::f64::consts::PI).unwrap();
        let n = Nonlinearity::new(grid, Derivative::Coordinate(0), NonlinearSign::Plus).unwrap();
        let a = 0.7;
        let u = SpectralField::plane_wave(grid, &[2, 0, 0, 0]).unwrap().scale_real(a);
        let f = n.eval(&u).unwrap();
        // u(x) = a e^{2ix}, so |u|^2 u = a^3 e^{2ix} and its x-derivative is 2i a^3 e^{2ix}.
        let expect = SpectralField::plane_wave(grid, &[2, 0, 0, 0])
            .unwrap()
            .scale(Complex64::new(0.0, 2.0 * a * a * a));
        assert!((&f - &expect).l2_norm() < 1e-12 * expect.l2_norm());
    }
}
