//! Monte Carlo studies: tails of randomized norms, good-set probabilities,
//! Picard contraction, smoothing, scattering and dilation.

pub mod acceptance;
mod dynamics;
mod ensemble;
mod khintchine;
mod linear;
mod tail;
mod tails;

pub use dynamics::{
    calibrate_constants, contraction_study, dilation_study, picard_ensemble, sample_json, scattering_study,
    smoothing_study, Calibration, ContractionReport, DilationReport, DilationRow, SampleRecord, ScatteringReport,
    SmoothingReport, SmoothingRow,
};
pub use ensemble::{run_indexed, run_indexed_with, with_workers, workers, DataSource, EnsembleSpec, Sampler, Statistic, WORKERS_ENV};
pub use khintchine::{khintchine_study, KhintchineReport, KhintchineRow};
pub use linear::{linear_norms, record_statistics, GoodSetEvaluator, StatisticTable, Window};
pub use tail::{
    exceedance, lambda_grid, log_log_slope, median, quantile, tail_fit, weighted_line, wilson_interval, TailFit, Z95,
};
pub use tails::{
    good_set_probability, good_set_window, hs_tail_study, omega_t_sweep, strichartz_tail_study, GoodSetCurve,
    HsTailReport, StrichartzEntry, StrichartzTailReport, WindowSweep, DEFAULT_EXCEEDANCE,
};

/// Wraps a study result with the spec that produced it.
pub fn json_report(study: &str, spec: &impl serde::Serialize, result: &impl serde::Serialize) -> serde_json::Value {
    serde_json::json!({
        "study": study,
        "spec": spec,
        "result": result,
    })
}
