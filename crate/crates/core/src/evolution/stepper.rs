use num_complex::Complex64;

use super::config::EvolutionConfig;
use super::nonlinearity::Nonlinearity;
use super::propagator::Propagator;
use crate::error::{Error, Result};
use crate::norms::Trajectory;
use crate::spectral::SpectralField;

/// Growth of the `L^2` norm past which a run is declared blown up.
pub const BLOW_UP_FACTOR: f64 = 1e6;

/// Integrating-factor RK4 for `u_t = L u - i F(u)` with `e^{tL} = S(t)`.
pub struct Stepper {
    nonlinearity: Nonlinearity,
    full: Vec<Complex64>,
    half: Vec<Complex64>,
    dt: f64,
    nonlinear: bool,
}

impl Stepper {
    pub fn new(grid: crate::spectral::Grid, config: &EvolutionConfig) -> Result<Self> {
        config.validate(grid.dim())?;
        let prop = Propagator::new(grid, config.phase_sign);
        Ok(Self {
            nonlinearity: Nonlinearity::new(grid, config.derivative, config.sign)?,
            full: prop.phases(config.dt),
            half: prop.phases(0.5 * config.dt),
            dt: config.dt,
            nonlinear: config.nonlinear,
        })
    }

    fn rhs(&self, u: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        self.nonlinearity.eval_into(u, out)?;
        let minus_i = Complex64::new(0.0, -1.0);
        for v in out.iter_mut() {
            *v *= minus_i;
        }
        Ok(())
    }

    /// Advances `u` by one step in place.
    pub fn step(&self, u: &mut [Complex64]) -> Result<()> {
        if !self.nonlinear {
            for (v, e) in u.iter_mut().zip(&self.full) {
                *v *= e;
            }
            return Ok(());
        }
        let len = u.len();
        let h = self.dt;
        let zero = Complex64::new(0.0, 0.0);
        let (mut k1, mut k2, mut k3, mut k4) = (vec![zero; len], vec![zero; len], vec![zero; len], vec![zero; len]);
        let mut tmp = vec![zero; len];

        self.rhs(u, &mut k1)?;
        for i in 0..len {
            tmp[i] = self.half[i] * (u[i] + 0.5 * h * k1[i]);
        }
        self.rhs(&tmp, &mut k2)?;
        for i in 0..len {
            tmp[i] = self.half[i] * u[i] + 0.5 * h * k2[i];
        }
        self.rhs(&tmp, &mut k3)?;
        for i in 0..len {
            tmp[i] = self.full[i] * u[i] + h * self.half[i] * k3[i];
        }
        self.rhs(&tmp, &mut k4)?;
        for i in 0..len {
            u[i] = self.full[i] * u[i]
                + h / 6.0 * (self.full[i] * k1[i] + 2.0 * self.half[i] * (k2[i] + k3[i]) + k4[i]);
        }
        Ok(())
    }
}

/// One integrating-factor RK4 step of size `config.dt`.
pub fn step_direct(u: &SpectralField, config: &EvolutionConfig) -> Result<SpectralField> {
    let stepper = Stepper::new(*u.grid(), config)?;
    let mut data = u.data().to_vec();
    stepper.step(&mut data)?;
    SpectralField::from_vec(*u.grid(), data)
}

/// Integrates `config.steps` steps from `u0` at time 0, keeping every snapshot.
///
/// Fails with `BlowUp` once a value stops being finite or the `L^2` norm
/// exceeds `BLOW_UP_FACTOR` times its initial value.
pub fn solve_direct(u0: &SpectralField, config: &EvolutionConfig) -> Result<Trajectory> {
    let stepper = Stepper::new(*u0.grid(), config)?;
    let initial = u0.l2_norm();
    let mut fields = Vec::with_capacity(config.steps + 1);
    fields.push(u0.clone());
    let mut data = u0.data().to_vec();
    for m in 1..=config.steps {
        let time = m as f64 * config.dt;
        stepper.step(&mut data).map_err(|e| match e {
            Error::NonFinite(what) => Error::BlowUp {
                time,
                reason: format!("non-finite {what}"),
            },
            other => other,
        })?;
        let field = SpectralField::from_vec(*u0.grid(), data.clone())?;
        let norm = field.l2_norm();
        if !norm.is_finite() || norm > BLOW_UP_FACTOR * initial.max(f64::MIN_POSITIVE) {
            return Err(Error::BlowUp {
                time,
                reason: format!("L2 norm {norm:e} against initial {initial:e}"),
            });
        }
        fields.push(field);
    }
    Trajectory::new(*u0.grid(), 0.0, config.dt, fields)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    fn bump(grid: Grid, a: f64) -> SpectralField {
        crate::spectral::dealias(&SpectralField::from_fn(grid, |xi| {
            let r2: f64 = xi.iter().map(|x| x * x).sum();
            Complex64::new(a * (-r2).exp(), 0.3 * a * xi[0] * (-r2).exp())
        }))
    }

    #[test]
    fn linear_switch_matches_propagator() {
        let grid = Grid::new(2, 16, 4.0).unwrap();
        let u0 = bump(grid, 1.0);
        let mut cfg = EvolutionConfig::new(0.01, 7);
        cfg.nonlinear = false;
        let traj = solve_direct(&u0, &cfg).unwrap();
        let expect = super::super::propagator::propagate(&u0, 0.07);
        assert!((traj.last() - &expect).l2_norm() < 1e-12 * u0.l2_norm());
    }

    #[test]
    fn fourth_order_convergence() {
        let grid = Grid::new(1, 32, 6.0).unwrap();
        let u0 = bump(grid, 3.0);
        let t = 0.02;
        let run = |steps: usize| {
            let cfg = EvolutionConfig::new(t / steps as f64, steps);
            solve_direct(&u0, &cfg).unwrap().last().clone()
        };
        let reference = run(640);
        let e1 = (&run(20) - &reference).l2_norm();
        let e2 = (&run(40) - &reference).l2_norm();
        let order = (e1 / e2).log2();
        assert!(order > 3.5, "observed order {order}");
    }
}
