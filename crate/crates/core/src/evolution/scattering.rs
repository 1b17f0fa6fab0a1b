use serde::Serialize;

use super::picard::BandTrajectory;
use super::propagator::Propagator;
use crate::error::{Error, Result};
use crate::norms::{sobolev_norm, Trajectory};
use crate::spectral::{DyadicPartition, PhaseSign, SpectralField};

/// Wrap-around check for a periodic box.
///
/// A packet at frequency `|xi|` travels at speed `4 |xi|^3`. The check uses
/// the largest frequency of the dyadic band carrying most of the energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoWrap {
    pub band: u64,
    pub max_frequency: f64,
    pub speed: f64,
    /// Longest window before the dominant band crosses the half-width.
    pub horizon: f64,
    pub window: f64,
    pub ok: bool,
}

pub fn no_wrap_check(phi: &SpectralField, window: f64) -> NoWrap {
    let grid = phi.grid();
    let partition = DyadicPartition::default();
    let xi2 = grid.xi_squared_table();
    let mut best = (1u64, -1.0);
    for band in partition.bands(grid) {
        let energy: f64 = phi
            .data()
            .iter()
            .zip(&xi2)
            .map(|(v, x)| (partition.symbol(band, x.sqrt()) * v.norm()).powi(2))
            .sum();
        if energy > best.1 {
            best = (band, energy);
        }
    }
    let band = best.0;
    let top = (grid.dim() as f64).sqrt() * grid.max_frequency();
    let max_frequency = (2.0 * band as f64).min(top);
    let speed = 4.0 * max_frequency.powi(3);
    let horizon = grid.half_width() / speed;
    NoWrap {
        band,
        max_frequency,
        speed,
        horizon,
        window: window.abs(),
        ok: window.abs() < horizon,
    }
}

/// `v_+ = w(T)` with `w(t) = S(-t) v(t)`, and the Cauchy residual
/// `m(t_m) = ||w(T) - w(t_m)||_{H^s}` at every snapshot.
#[derive(Clone, Debug, Serialize)]
pub struct ScatteringState {
    #[serde(skip)]
    pub state: SpectralField,
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    pub no_wrap: Option<NoWrap>,
}

impl ScatteringState {
    /// Whether `m` is nonincreasing over the trailing half of the window.
    pub fn tail_nonincreasing(&self, slack: f64) -> bool {
        let m = self.residuals.len();
        self.residuals[m / 2..]
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + slack) + f64::MIN_POSITIVE)
    }
}

fn extract(
    len: usize,
    time: impl Fn(usize) -> f64,
    field: impl Fn(usize) -> SpectralField,
    prop: &Propagator,
    s: f64,
) -> Result<ScatteringState> {
    if len == 0 {
        return Err(Error::EmptyTrajectory);
    }
    let last = len - 1;
    let state = prop.apply(&field(last), -time(last))?;
    let mut residuals = Vec::with_capacity(len);
    for m in 0..len {
        let w = prop.apply(&field(m), -time(m))?;
        residuals.push(sobolev_norm(&(&state - &w), s, false));
    }
    Ok(ScatteringState {
        state,
        times: (0..len).map(time).collect(),
        residuals,
        no_wrap: None,
    })
}

/// Scattering state of a solved Duhamel part `v` on its window.
///
/// Pass the data `phi` to attach the wrap-around check; when it fails the
/// returned `no_wrap.ok` is false and the residual curve should not be read
/// as a scattering proxy.
pub fn scattering_state(
    v: &Trajectory,
    sign: PhaseSign,
    s: f64,
    phi: Option<&SpectralField>,
) -> Result<ScatteringState> {
    let prop = Propagator::new(*v.grid(), sign);
    let mut out = extract(v.len(), |m| v.time(m), |m| v.fields()[m].clone(), &prop, s)?;
    out.no_wrap = phi.map(|p| no_wrap_check(p, v.time(v.len() - 1) - v.t0()));
    Ok(out)
}

/// As `scattering_state`, reading the compact output of `solve_perturbed`.
pub fn scattering_state_band(
    v: &BandTrajectory,
    sign: PhaseSign,
    s: f64,
    phi: Option<&SpectralField>,
) -> Result<ScatteringState> {
    let prop = Propagator::new(*v.grid(), sign);
    let mut out = extract(v.len(), |m| v.time(m), |m| v.field(m), &prop, s)?;
    out.no_wrap = phi.map(|p| no_wrap_check(p, v.time(v.len().saturating_sub(1))));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn zero_duhamel_part_scatters_to_zero() {
        let grid = Grid::new(2, 8, 3.0).unwrap();
        let v = Trajectory::zeros(grid, 0.0, 0.1, 5).unwrap();
        let st = scattering_state(&v, PhaseSign::Negative, 0.0, None).unwrap();
        assert_eq!(st.state.max_abs(), 0.0);
        assert!(st.residuals.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn low_band_data_has_long_horizon() {
        let grid = Grid::new(1, 32, 20.0).unwrap();
        let phi = SpectralField::from_fn(grid, |xi| num_complex::Complex64::new((-4.0 * xi[0] * xi[0]).exp(), 0.0));
        let nw = no_wrap_check(&phi, 1.0);
        assert_eq!(nw.band, 1);
        assert!((nw.speed - 32.0).abs() < 1e-12);
        assert!(!nw.ok);
        assert!(no_wrap_check(&phi, 0.5).ok);
    }
}
