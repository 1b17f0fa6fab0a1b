use serde::Serialize;

use super::ensemble::{run_indexed, EnsembleSpec};
use super::linear::{linear_norms, GoodSetEvaluator, Window};
use super::tail::{exceedance, lambda_grid, log_log_slope, median, tail_fit, wilson_interval, TailFit, Z95};
use crate::error::{Error, Result};
use crate::evolution::{no_wrap_check, NoWrap, Propagator};
use crate::norms::{AdmissiblePair, Exponent, GoodSet, NormTerm, PairKind};
use crate::spectral::FourierTransform;

/// Exceedance range used when no `lambda` grid is supplied.
pub const DEFAULT_EXCEEDANCE: (f64, f64) = (0.5, 0.01);
const DEFAULT_POINTS: usize = 12;

fn grid_or_default(values: &[f64], lambdas: Option<&[f64]>) -> Vec<f64> {
    match lambdas {
        Some(l) => l.to_vec(),
        None => lambda_grid(values, DEFAULT_EXCEEDANCE.0, DEFAULT_EXCEEDANCE.1, DEFAULT_POINTS),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HsTailReport {
    pub s: f64,
    pub values: Vec<f64>,
    pub fit: TailFit,
}

/// Tail of `||phi^omega||_{H^s}` over the ensemble.
pub fn hs_tail_study(spec: &EnsembleSpec, s: f64, lambdas: Option<&[f64]>) -> Result<HsTailReport> {
    let sampler = spec.sampler()?;
    let values = run_indexed(spec.samples, |i| {
        sampler.sample(i).map(|phi| crate::norms::sobolev_norm(&phi, s, false))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let fit = tail_fit(&values, &grid_or_default(&values, lambdas))?;
    Ok(HsTailReport { s, values, fit })
}

/// A randomized Strichartz entry: base pair `(q, r)` of the given kind,
/// measured in `L^q_t L^{r_bar}_x` with derivative weight `w`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StrichartzEntry {
    pub q: f64,
    pub r: f64,
    pub r_bar: f64,
    pub w: f64,
    pub kind: PairKind,
}

impl StrichartzEntry {
    pub fn validate(&self, dim: usize) -> Result<()> {
        AdmissiblePair::new(Exponent::from_f64(self.q)?, Exponent::from_f64(self.r)?, dim, self.kind)?;
        if !(self.r <= self.r_bar && self.r_bar.is_finite()) {
            return Err(Error::param("r_bar", format!("need r <= r_bar < inf, got r = {}, r_bar = {}", self.r, self.r_bar)));
        }
        let want = match self.kind {
            PairKind::Biharmonic => 0.0,
            PairKind::Schrodinger => 2.0 / self.q,
        };
        if (self.w - want).abs() > 1e-12 {
            return Err(Error::param("w", format!("{:?} base needs w = {want}, got {}", self.kind, self.w)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StrichartzTailReport {
    pub entry: StrichartzEntry,
    pub window: Window,
    pub no_wrap: NoWrap,
    pub values: Vec<f64>,
    pub fit: TailFit,
}

/// Tail of `|| |grad|^w S(t) phi^omega ||_{L^q_t L^{r_bar}_x}` over the
/// forward window of `spec.evolution`.
pub fn strichartz_tail_study(
    spec: &EnsembleSpec,
    entry: StrichartzEntry,
    lambdas: Option<&[f64]>,
) -> Result<StrichartzTailReport> {
    entry.validate(spec.grid.dim())?;
    let sampler = spec.sampler()?;
    let window = Window::forward(spec.evolution.window(), spec.evolution.steps);
    let plan = FourierTransform::new(spec.grid);
    let prop = Propagator::new(spec.grid, spec.evolution.phase_sign);
    let term = [NormTerm::new(entry.q, entry.r_bar, entry.w)];
    let values = run_indexed(spec.samples, |i| -> Result<f64> {
        let phi = sampler.sample(i)?;
        Ok(linear_norms(&plan, &prop, &phi, &term, 0.0, window)?[0])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let fit = tail_fit(&values, &grid_or_default(&values, lambdas))?;
    Ok(StrichartzTailReport {
        entry,
        window,
        no_wrap: no_wrap_check(sampler.base(), window.length()),
        values,
        fit,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodSetCurve {
    pub kind: GoodSet,
    pub s: f64,
    pub window: Window,
    pub thresholds: Vec<f64>,
    /// Empirical `1 - P(good set)` at each threshold.
    pub complement: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub statistics: Vec<f64>,
    /// Gaussian-shape fit of the complement, when enough points are usable.
    pub fit: Option<TailFit>,
}

/// Window used for a good set: `(-T, T)` for `OmegaT`, `[0, T]` otherwise.
pub fn good_set_window(kind: GoodSet, length: f64, steps: usize) -> Window {
    if kind == GoodSet::OmegaT {
        Window::symmetric(length, steps)
    } else {
        Window::forward(length, steps)
    }
}

fn statistics_for(spec: &EnsembleSpec, kind: GoodSet, s: f64, delta: f64, window: Window) -> Result<Vec<f64>> {
    let sampler = spec.sampler()?;
    let eval = GoodSetEvaluator::new(spec.grid, kind, s, delta, window, spec.evolution.phase_sign)?;
    run_indexed(spec.samples, |i| eval.statistic(&sampler.sample(i)?))
        .into_iter()
        .collect()
}

/// Empirical `1 - P(E)` over a threshold grid for one good-set kind.
pub fn good_set_probability(
    spec: &EnsembleSpec,
    kind: GoodSet,
    s: f64,
    thresholds: &[f64],
    delta: f64,
) -> Result<GoodSetCurve> {
    let window = good_set_window(kind, spec.evolution.window(), spec.evolution.steps);
    let stats = statistics_for(spec, kind, s, delta, window)?;
    let n = stats.len();
    let mut complement = Vec::new();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for &r in thresholds {
        let bad = stats
            .iter()
            .filter(|&&x| !crate::norms::decide(kind, x, r))
            .count();
        let (lo, hi) = wilson_interval(bad, n, Z95);
        complement.push(bad as f64 / n as f64);
        lower.push(lo);
        upper.push(hi);
    }
    let fit = if n >= 100 { tail_fit(&stats, thresholds).ok() } else { None };
    Ok(GoodSetCurve {
        kind,
        s,
        window,
        thresholds: thresholds.to_vec(),
        complement,
        lower,
        upper,
        statistics: stats,
        fit,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowSweep {
    pub windows: Vec<f64>,
    pub medians: Vec<f64>,
    /// `2 x` the log-log slope of the median statistic in `T`.
    pub gamma: f64,
    /// Exceedance counts of the largest-window median at every window.
    pub exceedances: Vec<usize>,
}

/// `Omega_T` statistic against window length.
///
/// The complement bound `C exp(-c / (T^gamma ||phi||^2))` says the statistic
/// grows like `T^{gamma/2}`; `gamma` is read off the medians.
pub fn omega_t_sweep(spec: &EnsembleSpec, s: f64, windows: &[f64], delta: f64) -> Result<WindowSweep> {
    let mut medians = Vec::new();
    let mut all = Vec::new();
    for &t in windows {
        let stats = statistics_for(spec, GoodSet::OmegaT, s, delta, Window::symmetric(t, spec.evolution.steps))?;
        medians.push(median(&stats));
        all.push(stats);
    }
    let reference = *medians.last().unwrap_or(&0.0);
    let exceedances = all.iter().map(|v| exceedance(v, &[reference])[0]).collect();
    Ok(WindowSweep {
        windows: windows.to_vec(),
        gamma: 2.0 * log_log_slope(windows, &medians),
        medians,
        exceedances,
    })
}
