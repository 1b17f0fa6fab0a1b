use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn positive(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {x}")))
    }
}

/// Local existence time `T = min(eta/(2 C1' R^3), 1/(4 C2' R^2))^{4/delta}`.
pub fn local_time_horizon(r: f64, eta: f64, c1p: f64, c2p: f64, delta: f64) -> Result<f64> {
    for (name, x) in [("R", r), ("eta", eta), ("C1'", c1p), ("C2'", c2p), ("delta", delta)] {
        positive(name, x)?;
    }
    let branch = (eta / (2.0 * c1p * r.powi(3))).min(1.0 / (4.0 * c2p * r * r));
    Ok(branch.powf(4.0 / delta))
}

/// Scale below which dilated data land in the small-data regime:
/// `mu_0 = c (eta / (||phi||_{H^s} sqrt(-log eps)))^{1/((d-3)/2 - s)}`.
pub fn dilation_scale_threshold(eta: f64, phi_norm: f64, eps: f64, s: f64, dim: usize, c: f64) -> Result<f64> {
    if dim < 4 {
        return Err(Error::param("d", format!("needs d >= 4, got {dim}")));
    }
    positive("eta", eta)?;
    positive("||phi||", phi_norm)?;
    positive("c", c)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("eps", format!("must lie in (0, 1), got {eps}")));
    }
    let gap = (dim as f64 - 3.0) / 2.0 - s;
    if !(gap > 0.0) {
        return Err(Error::param("s", format!("must be below (d-3)/2, got {s}")));
    }
    Ok(c * (eta / (phi_norm * (-eps.ln()).sqrt())).powf(1.0 / gap))
}

/// Measured constants of the two nonlinear estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearConstants {
    pub c1: f64,
    pub c2: f64,
}

/// Which pair of smallness conditions fixes `eta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SmallnessRegime {
    /// `2 C1' eta^2 <= 1` and `2 C2' eta^2 <= 1/4`.
    Local,
    /// `2 C1 eta^2 <= 1` and `3 C2 eta^2 <= 1/2`.
    Global,
}

/// Largest `eta` satisfying both smallness conditions.
pub fn eta_from_constants(k: NonlinearConstants, regime: SmallnessRegime) -> Result<f64> {
    positive("C1", k.c1)?;
    positive("C2", k.c2)?;
    let second = match regime {
        SmallnessRegime::Local => 1.0 / (8.0 * k.c2),
        SmallnessRegime::Global => 1.0 / (6.0 * k.c2),
    };
    Ok((1.0 / (2.0 * k.c1)).min(second).sqrt())
}

/// Whether `eta` meets both smallness conditions.
pub fn eta_is_admissible(eta: f64, k: NonlinearConstants, regime: SmallnessRegime) -> bool {
    let e2 = eta * eta;
    match regime {
        SmallnessRegime::Local => 2.0 * k.c1 * e2 <= 1.0 && 2.0 * k.c2 * e2 <= 0.25,
        SmallnessRegime::Global => 2.0 * k.c1 * e2 <= 1.0 && 3.0 * k.c2 * e2 <= 0.5,
    }
}
