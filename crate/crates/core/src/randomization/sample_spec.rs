use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// Deterministic test data `phi^(xi) = a <xi>^{-alpha}` with zero phase.
///
/// On `R^d` this lies in `H^s` exactly when `s < alpha - d/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevSampleSpec {
    pub alpha: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

impl SobolevSampleSpec {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::param("alpha", format!("profile exponent must be positive, got {alpha}")));
        }
        Ok(Self { alpha, amplitude: 1.0 })
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    /// Supremum of the Sobolev indices containing the profile.
    pub fn regularity_threshold(&self, dim: usize) -> f64 {
        self.alpha - dim as f64 / 2.0
    }

    pub fn is_member(&self, s: f64, dim: usize) -> bool {
        s < self.regularity_threshold(dim)
    }

    pub fn field(&self, grid: &Grid) -> SpectralField {
        let a = self.amplitude;
        let alpha = self.alpha;
        SpectralField::from_fn(*grid, |xi| {
            let r2: f64 = xi.iter().map(|x| x * x).sum();
            Complex64::new(a * (1.0 + r2).powf(-alpha / 2.0), 0.0)
        })
    }
}
