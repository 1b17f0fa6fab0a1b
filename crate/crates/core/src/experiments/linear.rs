use serde::Serialize;

use super::ensemble::{run_indexed, EnsembleSpec, Statistic};
use crate::error::Result;
use crate::evolution::Propagator;
use crate::norms::{make_schedule, sobolev_norm, GoodSet, NormSchedule, NormTerm, SpaceTimeNorms};
use crate::spectral::{FourierTransform, SpectralField};

/// Time lattice `t_m = t0 + m dt`, `m = 0..=steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub t0: f64,
    pub dt: f64,
    pub steps: usize,
}

impl Window {
    pub fn forward(length: f64, steps: usize) -> Self {
        Self {
            t0: 0.0,
            dt: length / steps as f64,
            steps,
        }
    }

    /// `(-T, T)` sampled with `steps` intervals on each side.
    pub fn symmetric(length: f64, steps: usize) -> Self {
        Self {
            t0: -length,
            dt: length / steps as f64,
            steps: 2 * steps,
        }
    }

    pub fn length(&self) -> f64 {
        self.dt.abs() * self.steps as f64
    }
}

/// Space-time norms of `S(t) phi` on the window without storing the orbit.
pub fn linear_norms(
    plan: &FourierTransform,
    prop: &Propagator,
    phi: &SpectralField,
    terms: &[NormTerm],
    s: f64,
    window: Window,
) -> Result<Vec<f64>> {
    let mut acc = SpaceTimeNorms::new(plan, terms, s);
    for m in 0..=window.steps {
        acc.push(&prop.apply(phi, window.t0 + m as f64 * window.dt)?)?;
    }
    acc.finish(window.dt)
}

fn schedule_terms(schedule: &NormSchedule) -> Vec<NormTerm> {
    schedule
        .entries()
        .map(|e| NormTerm::new(e.q.value(), e.r.value(), e.w()))
        .collect()
}

/// Evaluates good-set statistics for one kind on many data.
pub struct GoodSetEvaluator {
    kind: GoodSet,
    s: f64,
    schedule: NormSchedule,
    terms: Vec<NormTerm>,
    window: Window,
    plan: FourierTransform,
    prop: Propagator,
}

impl GoodSetEvaluator {
    pub fn new(spec_grid: crate::spectral::Grid, kind: GoodSet, s: f64, delta: f64, window: Window, prop_sign: crate::spectral::PhaseSign) -> Result<Self> {
        let schedule = make_schedule(kind.schedule_kind(), spec_grid.dim(), delta)?;
        Ok(Self {
            kind,
            s,
            terms: schedule_terms(&schedule),
            schedule,
            window,
            plan: FourierTransform::new(spec_grid),
            prop: Propagator::new(spec_grid, prop_sign),
        })
    }

    pub fn kind(&self) -> GoodSet {
        self.kind
    }

    /// `||phi||_{H^s} + ||A S(t) phi||_S`.
    pub fn statistic(&self, phi: &SpectralField) -> Result<f64> {
        let smooth = if self.kind == GoodSet::ERPrime { 0.0 } else { self.s };
        let values = linear_norms(&self.plan, &self.prop, phi, &self.terms, smooth, self.window)?;
        Ok(sobolev_norm(phi, self.s, false) + self.schedule.aggregate(&values))
    }

    pub fn member(&self, phi: &SpectralField, threshold: f64) -> Result<(bool, f64)> {
        let stat = self.statistic(phi)?;
        Ok((crate::norms::decide(self.kind, stat, threshold), stat))
    }
}

/// One row of recorded statistics per sample, in sample order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatisticTable {
    pub statistics: Vec<Statistic>,
    pub rows: Vec<Vec<f64>>,
}

impl StatisticTable {
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample");
        for j in 0..self.statistics.len() {
            out.push_str(&format!(",stat{j}"));
        }
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&i.to_string());
            for v in row {
                out.push_str(&format!(",{v:e}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Evaluates `spec.statistics` on every sample over the forward window of
/// `spec.evolution` (two-sided for `OmegaT`).
pub fn record_statistics(spec: &EnsembleSpec, delta: f64) -> Result<StatisticTable> {
    let sampler = spec.sampler()?;
    let grid = spec.grid;
    let ev = spec.evolution;
    let forward = Window::forward(ev.window(), ev.steps);
    let plan = FourierTransform::new(grid);
    let prop = Propagator::new(grid, ev.phase_sign);
    let mut evaluators = Vec::new();
    for st in &spec.statistics {
        if let Statistic::GoodSet { kind, s } = *st {
            let window = if kind == GoodSet::OmegaT {
                Window::symmetric(ev.window(), ev.steps)
            } else {
                forward
            };
            evaluators.push(Some(GoodSetEvaluator::new(grid, kind, s, delta, window, ev.phase_sign)?));
        } else {
            evaluators.push(None);
        }
    }
    let rows = run_indexed(spec.samples, |i| -> Result<Vec<f64>> {
        let phi = sampler.sample(i)?;
        spec.statistics
            .iter()
            .zip(&evaluators)
            .map(|(st, ev)| match (*st, ev) {
                (Statistic::Sobolev { s }, _) => Ok(sobolev_norm(&phi, s, false)),
                (Statistic::Mixed { q, r, w, s }, _) => {
                    Ok(linear_norms(&plan, &prop, &phi, &[NormTerm::new(q, r, w)], s, forward)?[0])
                }
                (Statistic::GoodSet { .. }, Some(e)) => e.statistic(&phi),
                (Statistic::GoodSet { .. }, None) => unreachable!("evaluator built above"),
            })
            .collect()
    });
    Ok(StatisticTable {
        statistics: spec.statistics.clone(),
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}
