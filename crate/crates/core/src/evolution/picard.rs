use num_complex::Complex64;
use serde::Serialize;

use super::config::EvolutionConfig;
use super::nonlinearity::Nonlinearity;
use super::propagator::Propagator;
use crate::error::{Error, Result};
use crate::norms::{make_schedule, Exponent, NormSchedule, Rational, ScheduleKind, SpaceTimeNorms, Trajectory};
use crate::spectral::{FourierTransform, Grid, SpectralField};

/// Snapshots that live inside the dealiased band, stored compactly.
///
/// Every Duhamel iterate is band-limited, so only `(n/2)^d` of the `n^d`
/// coefficients are kept.
#[derive(Clone, Debug)]
pub struct BandTrajectory {
    grid: Grid,
    dt: f64,
    modes: Vec<usize>,
    snapshots: Vec<Vec<Complex64>>,
}

impl BandTrajectory {
    fn new(grid: Grid, dt: f64, mask: &[f64], len: usize) -> Self {
        let modes: Vec<usize> = (0..grid.len()).filter(|&i| mask[i] != 0.0).collect();
        let snapshots = vec![vec![Complex64::new(0.0, 0.0); modes.len()]; len];
        Self { grid, dt, modes, snapshots }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn time(&self, m: usize) -> f64 {
        m as f64 * self.dt
    }

    /// Flat storage indices of the retained modes.
    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    fn expand_into(&self, values: &[Complex64], out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
        for (&i, v) in self.modes.iter().zip(values) {
            out[i] = *v;
        }
    }

    fn gather(&self, full: &[Complex64]) -> Vec<Complex64> {
        self.modes.iter().map(|&i| full[i]).collect()
    }

    pub fn field(&self, m: usize) -> SpectralField {
        let mut data = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        self.expand_into(&self.snapshots[m], &mut data);
        SpectralField::from_vec(self.grid, data).expect("grid length")
    }

    pub fn to_trajectory(&self) -> Result<Trajectory> {
        Trajectory::new(self.grid, 0.0, self.dt, (0..self.len()).map(|m| self.field(m)).collect())
    }
}

/// Per-solve record of the Picard iteration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PicardDiagnostics {
    pub iterations: usize,
    /// `||v_k||` for every iterate, in the norm named by `norm`.
    pub norms: Vec<f64>,
    /// `||v_k - v_{k-1}||`, starting with `||v_1 - 0||`.
    pub increments: Vec<f64>,
    /// Consecutive increment ratios.
    pub ratios: Vec<f64>,
    pub converged: bool,
    /// Whether every iterate stayed in `B_eta`; absent when no radius was given.
    pub in_ball: Option<bool>,
    pub blow_up: bool,
    pub norm: String,
}

impl PicardDiagnostics {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }
}

#[derive(Clone, Debug)]
pub struct PerturbedSolution {
    pub v: BandTrajectory,
    pub diagnostics: PicardDiagnostics,
}

impl PerturbedSolution {
    pub fn v_final(&self) -> SpectralField {
        self.v.field(self.v.len() - 1)
    }
}

/// One application of the Duhamel map, `Gamma v` on the time lattice of `v`.
///
/// `v` and `z` must share grid, start time and step. The integral is taken
/// from the first snapshot, so `(Gamma v)(t_0) = 0`.
pub fn picard_iterate(v: &Trajectory, z: &Trajectory, config: &EvolutionConfig) -> Result<Trajectory> {
    v.check_compatible(z)?;
    let grid = *v.grid();
    config.validate(grid.dim())?;
    let nonlinearity = Nonlinearity::new(grid, config.derivative, config.sign)?;
    let dt = v.dt();
    let step_phase = Propagator::new(grid, config.phase_sign).phases(dt);
    let zero = Complex64::new(0.0, 0.0);
    let mut w = vec![zero; grid.len()];
    let mut f_prev = vec![zero; grid.len()];
    let mut f_m = vec![zero; grid.len()];
    let minus_i = Complex64::new(0.0, -1.0);
    let mut out = Vec::with_capacity(v.len());
    if !config.nonlinear {
        return Trajectory::zeros(grid, v.t0(), dt, v.steps());
    }
    for (m, (a, b)) in v.fields().iter().zip(z.fields()).enumerate() {
        let sum = a + b;
        nonlinearity.eval_into(sum.data(), &mut f_m).map_err(|_| Error::BlowUp {
            time: v.time(m),
            reason: "non-finite nonlinearity".into(),
        })?;
        if m > 0 {
            for i in 0..w.len() {
                w[i] = step_phase[i] * (w[i] + 0.5 * dt * f_prev[i]) + 0.5 * dt * f_m[i];
            }
        }
        out.push(SpectralField::from_vec(grid, w.iter().map(|x| minus_i * x).collect())?);
        std::mem::swap(&mut f_prev, &mut f_m);
    }
    Trajectory::new(grid, v.t0(), dt, out)
}

/// The norm in which Picard iterates are measured: `X^{s_c}` with
/// `s_c = (d-3)/2` when `d >= 3`, `L^infty_t L^2_x` below that.
pub fn iteration_norm(dim: usize, delta: f64) -> Result<(NormSchedule, f64, String)> {
    if dim >= 3 {
        let schedule = make_schedule(ScheduleKind::X, dim, delta)?;
        let s = (dim as f64 - 3.0) / 2.0;
        Ok((schedule, s, format!("X^{s}")))
    } else {
        let schedule = NormSchedule::single(dim, Exponent::INFINITY, Exponent::integer(2), Rational::from_integer(0));
        Ok((schedule, 0.0, "L^inf_t L^2_x".into()))
    }
}

/// Solves `v = Gamma v` for `Gamma v(t) = -i ∫_0^t S(t-t') F(v + z)(t') dt'`
/// with `z = S(t) phi`, over `t_m = m dt`, `m = 0..=steps`.
///
/// The integral uses the trapezoid rule in the interaction picture:
/// `W_m = S(dt) W_{m-1} + dt/2 (S(dt) F_{m-1} + F_m)`, `Gamma v_m = -i W_m`.
/// Iteration starts at `v_0 = 0` and stops when the relative increment drops
/// to `picard.tolerance`, after `picard.max_iterations`, or on blow-up.
pub fn solve_perturbed(phi: &SpectralField, config: &EvolutionConfig) -> Result<PerturbedSolution> {
    let grid = *phi.grid();
    config.validate(grid.dim())?;
    if !phi.is_finite() {
        return Err(Error::NonFinite("initial data".into()));
    }
    let (schedule, s, norm_name) = iteration_norm(grid.dim(), config.picard.delta)?;
    let plan = FourierTransform::new(grid);
    let nonlinearity = Nonlinearity::new(grid, config.derivative, config.sign)?;
    let prop = Propagator::new(grid, config.phase_sign);
    let steps = config.steps;
    let dt = config.dt;

    let mut v = BandTrajectory::new(grid, dt, nonlinearity.mask(), steps + 1);
    let step_phase = v.gather(&prop.phases(dt));
    let phi_band = v.gather(phi.data());
    let z: Vec<Vec<Complex64>> = (0..=steps)
        .map(|m| {
            let ph = v.gather(&prop.phases(m as f64 * dt));
            ph.iter().zip(&phi_band).map(|(a, b)| a * b).collect()
        })
        .collect();

    let k = v.modes().len();
    let zero = Complex64::new(0.0, 0.0);
    if !config.nonlinear {
        // Gamma is identically zero, so v_1 = 0 is the fixed point.
        return Ok(PerturbedSolution {
            v,
            diagnostics: PicardDiagnostics {
                iterations: 1,
                norms: vec![0.0],
                increments: vec![0.0],
                ratios: Vec::new(),
                converged: true,
                in_ball: config.picard.eta.map(|_| true),
                blow_up: false,
                norm: norm_name,
            },
        });
    }
    let mut full = vec![zero; grid.len()];
    let mut forcing = vec![zero; grid.len()];
    let mut diag = PicardDiagnostics {
        iterations: 0,
        norms: Vec::new(),
        increments: Vec::new(),
        ratios: Vec::new(),
        converged: false,
        in_ball: config.picard.eta.map(|_| true),
        blow_up: false,
        norm: norm_name,
    };
    let minus_i = Complex64::new(0.0, -1.0);

    'outer: for _ in 0..config.picard.max_iterations {
        let mut acc_new = SpaceTimeNorms::for_schedule(&plan, &schedule, s);
        let mut acc_diff = SpaceTimeNorms::for_schedule(&plan, &schedule, s);
        let mut w = vec![zero; k];
        let mut f_prev = vec![zero; k];
        for m in 0..=steps {
            let sum: Vec<Complex64> = v.snapshots[m].iter().zip(&z[m]).map(|(a, b)| a + b).collect();
            v.expand_into(&sum, &mut full);
            if nonlinearity.eval_into(&full, &mut forcing).is_err() {
                diag.blow_up = true;
                break 'outer;
            }
            let f_m = v.gather(&forcing);
            if m > 0 {
                for i in 0..k {
                    w[i] = step_phase[i] * (w[i] + 0.5 * dt * f_prev[i]) + 0.5 * dt * f_m[i];
                }
            }
            let new: Vec<Complex64> = w.iter().map(|a| minus_i * a).collect();
            let diff: Vec<Complex64> = new.iter().zip(&v.snapshots[m]).map(|(a, b)| a - b).collect();
            v.expand_into(&diff, &mut full);
            acc_diff.push(&SpectralField::from_vec(grid, full.clone())?)?;
            v.expand_into(&new, &mut full);
            acc_new.push(&SpectralField::from_vec(grid, full.clone())?)?;
            v.snapshots[m] = new;
            f_prev = f_m;
        }
        let norm = schedule.aggregate(&acc_new.finish(dt)?);
        let increment = schedule.aggregate(&acc_diff.finish(dt)?);
        diag.iterations += 1;
        if let Some(&last) = diag.increments.last() {
            diag.ratios.push(if last > 0.0 { increment / last } else { 0.0 });
        }
        diag.norms.push(norm);
        diag.increments.push(increment);
        if let (Some(eta), Some(flag)) = (config.picard.eta, diag.in_ball.as_mut()) {
            *flag &= norm <= eta;
        }
        let first = diag.norms[0].max(f64::MIN_POSITIVE);
        if !norm.is_finite() || norm > super::stepper::BLOW_UP_FACTOR * first {
            diag.blow_up = true;
            break;
        }
        if increment <= config.picard.tolerance * norm {
            diag.converged = true;
            break;
        }
    }
    if diag.blow_up {
        diag.converged = false;
    }
    Ok(PerturbedSolution { v, diagnostics: diag })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_converges_at_once() {
        let grid = Grid::new(3, 8, 4.0).unwrap();
        let sol = solve_perturbed(&SpectralField::zeros(grid), &EvolutionConfig::new(0.01, 4)).unwrap();
        let d = &sol.diagnostics;
        assert!(d.converged);
        assert_eq!(d.iterations, 1);
        assert_eq!(d.norms, vec![0.0]);
        assert_eq!(sol.v_final().max_abs(), 0.0);
    }

    #[test]
    fn fixed_point_matches_direct_solve() {
        // u = z + v solves the full equation, so it must agree with the
        // direct integrator to the accuracy of the trapezoid rule.
        let grid = Grid::new(1, 32, 6.0).unwrap();
        let phi = crate::spectral::dealias(&SpectralField::from_fn(grid, |xi| {
            Complex64::new(2.0 * (-xi[0] * xi[0]).exp(), 0.0)
        }));
        let steps = 400;
        let mut cfg = EvolutionConfig::new(0.05 / steps as f64, steps);
        cfg.picard.tolerance = 1e-13;
        let sol = solve_perturbed(&phi, &cfg).unwrap();
        assert!(sol.diagnostics.converged, "{:?}", sol.diagnostics);
        let z = super::super::propagator::propagate(&phi, cfg.window());
        let u = &z + &sol.v_final();
        let direct = super::super::stepper::solve_direct(&phi, &cfg).unwrap();
        let err = (&u - direct.last()).l2_norm() / sol.v_final().l2_norm();
        assert!(err < 1e-3, "relative error {err}");
    }
}
