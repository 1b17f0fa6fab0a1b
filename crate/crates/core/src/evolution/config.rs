use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Derivative, PhaseSign};

/// Sign in front of the nonlinearity: `i u_t + Δ² u = ± ∂(|u|²u)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NonlinearSign {
    #[default]
    Plus,
    Minus,
}

impl NonlinearSign {
    pub fn as_f64(self) -> f64 {
        match self {
            NonlinearSign::Plus => 1.0,
            NonlinearSign::Minus => -1.0,
        }
    }
}

/// Picard iteration controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    pub max_iterations: usize,
    /// Stop once `||v_{k+1} - v_k|| <= tolerance * ||v_{k+1}||`.
    pub tolerance: f64,
    /// Radius of the ball `B_eta`; `None` skips the membership flag.
    pub eta: Option<f64>,
    /// Small parameter of the `X` schedule.
    pub delta: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            max_iterations: 30,
            tolerance: 1e-10,
            eta: None,
            delta: 0.1,
        }
    }
}

/// Everything a solve needs apart from the data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub derivative: Derivative,
    pub sign: NonlinearSign,
    pub phase_sign: PhaseSign,
    /// Signed time step; negative runs backward.
    pub dt: f64,
    pub steps: usize,
    /// When false the nonlinearity is switched off.
    pub nonlinear: bool,
    pub picard: PicardConfig,
}

impl EvolutionConfig {
    pub fn new(dt: f64, steps: usize) -> Self {
        Self {
            derivative: Derivative::Coordinate(0),
            sign: NonlinearSign::Plus,
            phase_sign: PhaseSign::Negative,
            dt,
            steps,
            nonlinear: true,
            picard: PicardConfig::default(),
        }
    }

    /// Window length `T = M dt`.
    pub fn window(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    /// The same run in the opposite time direction.
    pub fn reversed(&self) -> Self {
        Self { dt: -self.dt, ..*self }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.dt.is_finite() && self.dt != 0.0) {
            return Err(Error::param("dt", format!("must be finite and nonzero, got {}", self.dt)));
        }
        if let Derivative::Coordinate(j) = self.derivative {
            if j >= dim {
                return Err(Error::param("derivative", format!("axis {j} out of range for d = {dim}")));
            }
        }
        if self.picard.max_iterations == 0 {
            return Err(Error::param("max_iterations", "must be at least 1"));
        }
        if !(self.picard.tolerance >= 0.0) {
            return Err(Error::param("tolerance", "must be nonnegative"));
        }
        if let Some(eta) = self.picard.eta {
            if !(eta > 0.0) {
                return Err(Error::param("eta", format!("must be positive, got {eta}")));
            }
        }
        Ok(())
    }
}
