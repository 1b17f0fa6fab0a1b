use num_complex::Complex64;
use serde::Serialize;

use super::schedule::NormSchedule;
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::spectral::{bessel, homogeneous, FourierTransform, SpectralField};

/// One `||<grad>^s |grad|^w u|_{L^q_t L^r_x}` term; exponents may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormTerm {
    pub q: f64,
    pub r: f64,
    pub w: f64,
}

impl NormTerm {
    pub fn new(q: f64, r: f64, w: f64) -> Self {
        Self { q, r, w }
    }
}

/// Streaming evaluator for several mixed norms of one trajectory.
///
/// Snapshots are pushed one at a time, so the trajectory never has to be
/// stored. Spatial norms with `r = 2` are taken spectrally; the others use
/// one inverse transform per distinct weight `w` and a Riemann sum.
pub struct SpaceTimeNorms {
    plan: FourierTransform,
    terms: Vec<NormTerm>,
    symbols: Vec<Vec<f64>>,
    term_symbol: Vec<usize>,
    spatial: Vec<Vec<f64>>,
    buf: Vec<Complex64>,
}

impl SpaceTimeNorms {
    pub fn new(plan: &FourierTransform, terms: &[NormTerm], s: f64) -> Self {
        let grid = plan.grid();
        let xi2 = grid.xi_squared_table();
        let mut weights: Vec<f64> = Vec::new();
        let mut term_symbol = Vec::with_capacity(terms.len());
        for t in terms {
            let idx = match weights.iter().position(|&w| w == t.w) {
                Some(i) => i,
                None => {
                    weights.push(t.w);
                    weights.len() - 1
                }
            };
            term_symbol.push(idx);
        }
        let symbols = weights
            .iter()
            .map(|&w| xi2.iter().map(|&x| bessel(x, s) * homogeneous(x, w)).collect())
            .collect();
        Self {
            plan: plan.clone(),
            terms: terms.to_vec(),
            symbols,
            term_symbol,
            spatial: vec![Vec::new(); terms.len()],
            buf: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn for_schedule(plan: &FourierTransform, schedule: &NormSchedule, s: f64) -> Self {
        let terms: Vec<NormTerm> = schedule
            .entries()
            .map(|e| NormTerm::new(e.q.value(), e.r.value(), e.w()))
            .collect();
        Self::new(plan, &terms, s)
    }

    pub fn terms(&self) -> &[NormTerm] {
        &self.terms
    }

    pub fn snapshots(&self) -> usize {
        self.spatial.first().map_or(0, |v| v.len())
    }

    pub fn push(&mut self, f: &SpectralField) -> Result<()> {
        self.plan.grid().check_same(f.grid(), "norm snapshot")?;
        let grid = *self.plan.grid();
        for (k, symbol) in self.symbols.iter().enumerate() {
            let users: Vec<usize> = (0..self.terms.len()).filter(|&t| self.term_symbol[t] == k).collect();
            let needs_physical = users.iter().any(|&t| self.terms[t].r != 2.0);
            for (b, (v, m)) in self.buf.iter_mut().zip(f.data().iter().zip(symbol)) {
                *b = v * m;
            }
            let l2 = {
                let sum: f64 = self.buf.iter().map(|v| v.norm_sqr()).sum();
                (sum * grid.mode_volume()).sqrt()
            };
            if needs_physical {
                self.plan.inverse_in_place(&mut self.buf);
            }
            // Log-moduli relative to the max, shared by every exponent of this weight.
            let (max, logs) = if needs_physical {
                let max = self.buf.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max).sqrt();
                let logs: Vec<f64> = if max > 0.0 {
                    self.buf.iter().map(|v| 0.5 * (v.norm_sqr() / (max * max)).ln()).collect()
                } else {
                    Vec::new()
                };
                (max, logs)
            } else {
                (0.0, Vec::new())
            };
            for &t in &users {
                let r = self.terms[t].r;
                let value = if r == 2.0 {
                    l2
                } else if r.is_infinite() || max == 0.0 {
                    max
                } else {
                    let sum: f64 = logs.iter().map(|l| (r * l).exp()).sum();
                    max * (sum * grid.cell_volume()).powf(1.0 / r)
                };
                if !value.is_finite() {
                    return Err(Error::NonFinite(format!("spatial L^{r} norm")));
                }
                self.spatial[t].push(value);
            }
        }
        Ok(())
    }

    /// Spatial norms recorded so far for term `t`, one per snapshot.
    pub fn spatial(&self, t: usize) -> &[f64] {
        &self.spatial[t]
    }

    /// Space-time norm of every term for snapshots spaced by `dt`.
    pub fn finish(&self, dt: f64) -> Result<Vec<f64>> {
        if self.snapshots() == 0 {
            return Err(Error::EmptyTrajectory);
        }
        Ok(self
            .terms
            .iter()
            .zip(&self.spatial)
            .map(|(t, v)| time_norm(v, t.q, dt))
            .collect())
    }
}

/// Trapezoid `L^q` norm in time of samples spaced by `|dt|`.
///
/// With a single sample every exponent returns that sample.
pub fn time_norm(values: &[f64], q: f64, dt: f64) -> f64 {
    let m = values.len();
    let max = values.iter().copied().fold(0.0, f64::max);
    if q.is_infinite() || m == 1 || max == 0.0 {
        return max;
    }
    let h = dt.abs();
    let sum: f64 = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let c = if i == 0 || i == m - 1 { 0.5 * h } else { h };
            c * (v / max).powf(q)
        })
        .sum();
    max * sum.powf(1.0 / q)
}

/// `||<grad>^s |grad|^w u|_{L^q_t L^r_x}` over the trajectory window.
pub fn mixed_norm_with(traj: &Trajectory, term: NormTerm, s: f64) -> Result<f64> {
    let plan = FourierTransform::new(*traj.grid());
    let mut acc = SpaceTimeNorms::new(&plan, &[term], s);
    for f in traj.fields() {
        acc.push(f)?;
    }
    Ok(acc.finish(traj.dt())?[0])
}

/// `||grad|^w u|_{L^q_t L^r_x}` over the trajectory window.
pub fn mixed_norm(traj: &Trajectory, q: f64, r: f64, w: f64) -> Result<f64> {
    check_exponents(q, r)?;
    mixed_norm_with(traj, NormTerm::new(q, r, w), 0.0)
}

fn check_exponents(q: f64, r: f64) -> Result<()> {
    for (name, p) in [("q", q), ("r", r)] {
        if p.is_nan() || p < 1.0 {
            return Err(Error::param(name, format!("exponent must be >= 1, got {p}")));
        }
    }
    Ok(())
}

/// Per-entry values of `<grad>^s u` for every schedule entry.
pub fn schedule_values(traj: &Trajectory, schedule: &NormSchedule, s: f64) -> Result<Vec<f64>> {
    if traj.grid().dim() != schedule.dim {
        return Err(Error::GridMismatch(format!(
            "schedule built for d = {}, trajectory has d = {}",
            schedule.dim,
            traj.grid().dim()
        )));
    }
    let plan = FourierTransform::new(*traj.grid());
    let mut acc = SpaceTimeNorms::for_schedule(&plan, schedule, s);
    for f in traj.fields() {
        acc.push(f)?;
    }
    acc.finish(traj.dt())
}

/// `||<grad>^s u||` in the schedule's norm, e.g. `||v||_{X^s}`.
pub fn schedule_norm(traj: &Trajectory, schedule: &NormSchedule, s: f64) -> Result<f64> {
    Ok(schedule.aggregate(&schedule_values(traj, schedule, s)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn time_norm_trapezoid() {
        let v = [1.0, 1.0, 1.0];
        // Constant 1 on a window of length 2: L^q norm is 2^{1/q}.
        assert!((time_norm(&v, 2.0, 1.0) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(time_norm(&v, f64::INFINITY, 1.0), 1.0);
        assert_eq!(time_norm(&[3.0], 4.0, 1.0), 3.0);
    }

    #[test]
    fn constant_single_mode() {
        let grid = Grid::new(2, 8, 1.0).unwrap();
        let f = SpectralField::plane_wave(grid, &[1, 1, 0, 0]).unwrap();
        let traj = Trajectory::new(grid, 0.0, 0.1, vec![f.clone(); 5]).unwrap();
        let got = mixed_norm(&traj, f64::INFINITY, 2.0, 0.0).unwrap();
        assert!((got - f.l2_norm()).abs() < 1e-12 * got);
        // |e^{ik.x}| = 1, so every L^r norm is (2L)^{d/r}.
        let got = mixed_norm(&traj, f64::INFINITY, 4.0, 0.0).unwrap();
        assert!((got - 4f64.powf(0.25)).abs() < 1e-12);
    }
}
