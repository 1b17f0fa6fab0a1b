use num_complex::Complex64;
use serde::Serialize;

use super::ensemble::{run_indexed, DataSource, EnsembleSpec, Sampler};
use super::linear::{GoodSetEvaluator, Window};
use super::tail::{log_log_slope, median};
use crate::error::{Error, Result};
use crate::evolution::{
    eta_from_constants, iteration_norm, picard_iterate, scattering_state_band, solve_perturbed, EvolutionConfig,
    NonlinearConstants, PicardDiagnostics, Propagator, SmallnessRegime,
};
use crate::norms::{schedule_norm, sobolev_norm, GoodSet, Trajectory};
use crate::randomization::dilate_field;
use crate::spectral::Grid;

#[derive(Clone, Debug, Serialize)]
pub struct Calibration {
    pub constants: NonlinearConstants,
    pub regime: SmallnessRegime,
    pub eta: f64,
    pub samples: usize,
    /// Per-sample lower bounds for `C1` and `C2`.
    pub c1_samples: Vec<f64>,
    pub c2_samples: Vec<f64>,
}

/// Lower bounds for the constants of the two nonlinear estimates, measured
/// on the first `samples` members of the ensemble.
///
/// `R` is the sample's `E_R` statistic; the test functions are `0`, `Gamma 0`
/// and `Gamma 0` rescaled to norm `R`. Each constant is the largest observed
/// ratio, and `eta` follows from the smallness conditions of `regime`.
pub fn calibrate_constants(
    spec: &EnsembleSpec,
    s: f64,
    delta: f64,
    samples: usize,
    regime: SmallnessRegime,
) -> Result<Calibration> {
    let sampler = spec.sampler()?;
    let grid = spec.grid;
    let ev = spec.evolution;
    let window = Window::forward(ev.window(), ev.steps);
    let eval = GoodSetEvaluator::new(grid, GoodSet::ER, s, delta, window, ev.phase_sign)?;
    let (schedule, sc, _) = iteration_norm(grid.dim(), ev.picard.delta)?;
    let prop = Propagator::new(grid, ev.phase_sign);
    let count = samples.min(spec.samples);
    let pairs = run_indexed(count, |i| -> Result<(f64, f64)> {
        let phi = sampler.sample(i)?;
        let r = eval.statistic(&phi)?;
        let z = prop.linear_trajectory(&phi, 0.0, ev.dt, ev.steps)?;
        let norm = |t: &Trajectory| schedule_norm(t, &schedule, sc);
        let zero = Trajectory::zeros(grid, 0.0, ev.dt, ev.steps)?;
        let g0 = picard_iterate(&zero, &z, &ev)?;
        let n1 = norm(&g0)?;
        let mut tests = vec![(zero.clone(), 0.0), (g0.clone(), n1)];
        if n1 > 0.0 {
            tests.push((g0.scale(Complex64::new(r / n1, 0.0)), r));
        }
        let images = tests
            .iter()
            .map(|(v, _)| picard_iterate(v, &z, &ev))
            .collect::<Result<Vec<_>>>()?;
        let mut c1 = 0.0f64;
        for ((_, nv), img) in tests.iter().zip(&images) {
            let denom = nv.powi(3) + r.powi(3);
            if denom > 0.0 {
                c1 = c1.max(norm(img)? / denom);
            }
        }
        let mut c2 = 0.0f64;
        for a in 0..tests.len() {
            for b in a + 1..tests.len() {
                let diff = norm(&tests[a].0.sub(&tests[b].0)?)?;
                let denom = (tests[a].1.powi(2) + tests[b].1.powi(2) + r * r) * diff;
                if denom > 0.0 {
                    c2 = c2.max(norm(&images[a].sub(&images[b])?)? / denom);
                }
            }
        }
        Ok((c1, c2))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let c1_samples: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let c2_samples: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let constants = NonlinearConstants {
        c1: c1_samples.iter().copied().fold(0.0, f64::max),
        c2: c2_samples.iter().copied().fold(0.0, f64::max),
    };
    Ok(Calibration {
        eta: eta_from_constants(constants, regime)?,
        constants,
        regime,
        samples: count,
        c1_samples,
        c2_samples,
    })
}

/// Outcome of one Picard solve inside a study.
#[derive(Clone, Debug, Serialize)]
pub struct SampleRecord {
    pub index: usize,
    pub statistic: f64,
    pub in_good_set: bool,
    pub diagnostics: Option<PicardDiagnostics>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContractionReport {
    pub eta: f64,
    pub amplitude: f64,
    pub good_samples: usize,
    pub contracting: usize,
    pub fraction: f64,
    pub excluded_blow_up: usize,
    pub excluded_not_converged: usize,
    pub cubic_amplitudes: Vec<f64>,
    pub cubic_norms: Vec<f64>,
    pub cubic_exponent: f64,
    pub records: Vec<SampleRecord>,
}

/// Picard contraction on the `E_eta` good set.
///
/// The data are rescaled so that the median `E_R` statistic equals
/// `median_fraction * eta`; for every sample inside the good set the solve
/// records whether all increment ratios stay at or below `1/2`.
pub fn contraction_study(
    spec: &EnsembleSpec,
    s: f64,
    delta: f64,
    eta: f64,
    median_fraction: f64,
) -> Result<ContractionReport> {
    let sampler = spec.sampler()?;
    let grid = spec.grid;
    let ev = spec.evolution;
    let window = Window::forward(ev.window(), ev.steps);
    let eval = GoodSetEvaluator::new(grid, GoodSet::ER, s, delta, window, ev.phase_sign)?;
    let stats = run_indexed(spec.samples, |i| eval.statistic(&sampler.sample(i)?))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let m = median(&stats);
    if !(m > 0.0) {
        return Err(Error::Degenerate("median good-set statistic is zero".into()));
    }
    let amplitude = median_fraction * eta / m;
    let mut cfg = ev;
    cfg.picard.eta = Some(eta);
    let records = run_indexed(spec.samples, |i| -> Result<SampleRecord> {
        let statistic = amplitude * stats[i];
        let in_good_set = crate::norms::decide(GoodSet::ER, statistic, eta);
        let diagnostics = if in_good_set {
            let phi = sampler.sample(i)?.scale_real(amplitude);
            Some(solve_perturbed(&phi, &cfg)?.diagnostics)
        } else {
            None
        };
        Ok(SampleRecord {
            index: i,
            statistic,
            in_good_set,
            diagnostics,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let good: Vec<&PicardDiagnostics> = records.iter().filter_map(|r| r.diagnostics.as_ref()).collect();
    let contracting = good
        .iter()
        .filter(|d| !d.blow_up && d.ratios.iter().all(|&r| r <= 0.5))
        .count();
    let excluded_blow_up = good.iter().filter(|d| d.blow_up).count();
    let excluded_not_converged = good.iter().filter(|d| !d.blow_up && !d.converged).count();

    // Exact cubic homogeneity of the first iterate.
    let phi0 = sampler.sample(0)?.scale_real(amplitude);
    let cubic_amplitudes = vec![1.0, 0.5, 0.25, 0.125];
    let mut first = cfg;
    first.picard.max_iterations = 1;
    let cubic_norms = cubic_amplitudes
        .iter()
        .map(|&a| Ok(solve_perturbed(&phi0.scale_real(a), &first)?.diagnostics.norms[0]))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ContractionReport {
        eta,
        amplitude,
        good_samples: good.len(),
        contracting,
        fraction: if good.is_empty() { 0.0 } else { contracting as f64 / good.len() as f64 },
        excluded_blow_up,
        excluded_not_converged,
        cubic_exponent: log_log_slope(&cubic_amplitudes, &cubic_norms),
        cubic_amplitudes,
        cubic_norms,
        records,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SmoothingRow {
    pub n: usize,
    pub z_norm: Vec<f64>,
    pub v_norm: Vec<f64>,
    pub excluded: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SmoothingReport {
    pub s_c: f64,
    /// Regularity of the data, `alpha - d/2`.
    pub s: f64,
    pub rows: Vec<SmoothingRow>,
    /// Median per-sample growth of `||z(T)||_{H^{s_c}}` between consecutive resolutions.
    pub z_growth: Vec<f64>,
    pub v_growth: Vec<f64>,
    /// `2^{0.8 (s_c - s)}`.
    pub required_z_growth: f64,
    pub z_ok: bool,
    pub v_ok: bool,
}

/// Resolution sweep of `||z(T)||_{H^{s_c}}` and `||v(T)||_{H^{s_c}}`.
///
/// The same coefficients are used at every resolution since each cube's
/// coefficient depends only on the seed and the cube label.
pub fn smoothing_study(spec: &EnsembleSpec, resolutions: &[usize], v_tolerance: f64) -> Result<SmoothingReport> {
    let profile = match &spec.data {
        DataSource::Sobolev(p) => *p,
        DataSource::Field(_) => {
            return Err(Error::param("data", "the resolution sweep needs a profile, not a fixed field"))
        }
    };
    let dim = spec.grid.dim();
    let s_c = (dim as f64 - 3.0) / 2.0;
    let s = profile.regularity_threshold(dim);
    let mut rows = Vec::new();
    for &n in resolutions {
        let mut local = spec.clone();
        local.grid = spec.grid.with_points(n)?;
        let sampler = local.sampler()?;
        let results = run_indexed(spec.samples, |i| -> Result<Option<(f64, f64)>> {
            let phi = sampler.sample(i)?;
            let sol = solve_perturbed(&phi, &local.evolution)?;
            if !sol.diagnostics.converged {
                return Ok(None);
            }
            Ok(Some((sobolev_norm(&phi, s_c, false), sobolev_norm(&sol.v_final(), s_c, false))))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let excluded = results.iter().filter(|r| r.is_none()).count();
        let (z_norm, v_norm) = results.iter().map(|r| r.unwrap_or((f64::NAN, f64::NAN))).unzip();
        rows.push(SmoothingRow { n, z_norm, v_norm, excluded });
    }
    let growth = |pick: fn(&SmoothingRow) -> &Vec<f64>| -> Vec<f64> {
        rows.windows(2)
            .map(|w| {
                let ratios: Vec<f64> = pick(&w[1])
                    .iter()
                    .zip(pick(&w[0]))
                    .filter(|(a, b)| a.is_finite() && b.is_finite() && **b > 0.0)
                    .map(|(a, b)| a / b)
                    .collect();
                median(&ratios)
            })
            .collect()
    };
    let z_growth = growth(|r| &r.z_norm);
    let v_growth = growth(|r| &r.v_norm);
    let required_z_growth = 2f64.powf(0.8 * (s_c - s));
    Ok(SmoothingReport {
        s_c,
        s,
        z_ok: z_growth.iter().all(|&g| g >= required_z_growth),
        v_ok: v_growth.iter().all(|&g| (g - 1.0).abs() <= v_tolerance),
        rows,
        z_growth,
        v_growth,
        required_z_growth,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScatteringReport {
    pub converged: usize,
    pub monotone: usize,
    pub fraction: f64,
    pub excluded: usize,
    pub no_wrap_ok: bool,
    pub residuals: Vec<Vec<f64>>,
}

/// Trailing-half monotonicity of the Cauchy residual over converged samples.
pub fn scattering_study(spec: &EnsembleSpec, s: f64) -> Result<ScatteringReport> {
    let sampler = spec.sampler()?;
    let ev = spec.evolution;
    let results = run_indexed(spec.samples, |i| -> Result<Option<(bool, Vec<f64>)>> {
        let phi = sampler.sample(i)?;
        let sol = solve_perturbed(&phi, &ev)?;
        if !sol.diagnostics.converged {
            return Ok(None);
        }
        let st = scattering_state_band(&sol.v, ev.phase_sign, s, None)?;
        Ok(Some((st.tail_nonincreasing(0.0), st.residuals)))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let converged = results.iter().filter(|r| r.is_some()).count();
    let monotone = results.iter().filter(|r| matches!(r, Some((true, _)))).count();
    Ok(ScatteringReport {
        converged,
        monotone,
        fraction: if converged == 0 { 0.0 } else { monotone as f64 / converged as f64 },
        excluded: spec.samples - converged,
        no_wrap_ok: crate::evolution::no_wrap_check(sampler.base(), ev.window()).ok,
        residuals: results.into_iter().flatten().map(|r| r.1).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DilationRow {
    pub mu: f64,
    pub complement: f64,
    /// Binomial standard error of `complement`.
    pub sigma: f64,
    pub median: f64,
    pub statistics: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DilationReport {
    pub eta: f64,
    pub s: f64,
    pub rows: Vec<DilationRow>,
    pub slope: f64,
    pub expected_slope: f64,
    /// Whether `1 - P(Omega_mu)` is nonincreasing as `mu` decreases, within
    /// two binomial standard errors.
    pub monotone: bool,
    pub mu_threshold: Option<f64>,
}

/// The `Omega_mu` statistic on unit-cube randomizations of the dilated data
/// `phi_mu`, for each `mu` in `mus`.
///
/// The dilated box has half-width `mu L` and the window is `mu^4 T`, which
/// maps the undilated problem onto itself.
pub fn dilation_study(spec: &EnsembleSpec, mus: &[f64], s: f64, eta: f64, delta: f64, eps: f64) -> Result<DilationReport> {
    let dim = spec.grid.dim();
    if dim < 4 {
        return Err(Error::param("d", format!("the dilation study needs d >= 4, got {dim}")));
    }
    let base = spec.base_field();
    let model = spec.model();
    let ev = spec.evolution;
    let mut rows = Vec::new();
    for &mu in mus {
        let target = Grid::new(dim, spec.grid.n(), mu * spec.grid.half_width())?;
        let phi_mu = dilate_field(&base, mu, &target)?;
        let sampler = Sampler::new(phi_mu, model.clone(), spec.partition_order)?;
        let window = Window::forward(mu.powi(4) * ev.window(), ev.steps);
        let eval = GoodSetEvaluator::new(target, GoodSet::OmegaMu, s, delta, window, ev.phase_sign)?;
        let stats = run_indexed(spec.samples, |i| eval.statistic(&sampler.sample(i)?))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let n = stats.len() as f64;
        let bad = stats
            .iter()
            .filter(|&&x| !crate::norms::decide(GoodSet::OmegaMu, x, eta))
            .count() as f64;
        let p = bad / n;
        rows.push(DilationRow {
            mu,
            complement: p,
            sigma: (p * (1.0 - p) / n).sqrt(),
            median: median(&stats),
            statistics: stats,
        });
    }
    let mut by_mu: Vec<&DilationRow> = rows.iter().collect();
    by_mu.sort_by(|a, b| b.mu.total_cmp(&a.mu));
    let monotone = by_mu.windows(2).all(|w| {
        let allowed = 2.0 * (w[0].sigma.powi(2) + w[1].sigma.powi(2)).sqrt();
        w[1].complement <= w[0].complement + allowed
    });
    let mus_v: Vec<f64> = rows.iter().map(|r| r.mu).collect();
    let medians: Vec<f64> = rows.iter().map(|r| r.median).collect();
    let phi_norm = sobolev_norm(&base, s, false);
    let mu_threshold = crate::evolution::dilation_scale_threshold(eta, phi_norm, eps, s, dim, 1.0).ok();
    Ok(DilationReport {
        eta,
        s,
        slope: log_log_slope(&mus_v, &medians),
        expected_slope: (dim as f64 - 3.0) / 2.0 - s.max(0.0),
        monotone,
        rows,
        mu_threshold,
    })
}

/// Runs `solve_perturbed` for every member and returns the diagnostics as
/// JSON lines in sample order.
pub fn picard_ensemble(spec: &EnsembleSpec, s: f64) -> Result<Vec<serde_json::Value>> {
    let sampler = spec.sampler()?;
    let ev: EvolutionConfig = spec.evolution;
    run_indexed(spec.samples, |i| -> Result<serde_json::Value> {
        let phi = sampler.sample(i)?;
        let sol = solve_perturbed(&phi, &ev)?;
        let residuals = if sol.diagnostics.converged {
            scattering_state_band(&sol.v, ev.phase_sign, s, None)?.residuals
        } else {
            Vec::new()
        };
        Ok(sample_json(i, &sol.diagnostics, &residuals))
    })
    .into_iter()
    .collect()
}

/// Per-sample diagnostics record.
pub fn sample_json(index: usize, d: &PicardDiagnostics, residuals: &[f64]) -> serde_json::Value {
    serde_json::json!({
        "sample": index,
        "converged": d.converged,
        "iterations": d.iterations,
        "ratios": d.ratios,
        "x_norm_final": d.norms.last().copied().unwrap_or(0.0),
        "blowup": d.blow_up,
        "scattering_residuals": residuals,
    })
}
