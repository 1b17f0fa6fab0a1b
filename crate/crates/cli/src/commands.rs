//! Subcommand bodies. Each returns the artifacts to persist.
//!
//! Plot-ready columns:
//! - `simulate.csv`: `t, z_l2, z_hs[, u_l2, u_hs, v_l2, v_hs]`
//! - `ensemble.csv`: `sample, hs, er`; `hs_tail.csv`, `er_tail.csv`: `lambda, p, lo, hi`
//! - `norms.csv`: `sample, hs`, then one `L^q_t L^r_x w=..` column per schedule entry
//! - `scaling.csv`: `mu, complement, sigma, median`
//! - `acceptance.txt`: one pass/fail line per criterion

use std::fmt::Write;

use quartic_nls::evolution::{solve_direct, Propagator};
use quartic_nls::experiments::acceptance::{run_suite, Artifact, Outcome};
use quartic_nls::experiments::{
    dilation_study, exceedance, json_report, lambda_grid, record_statistics, tail_fit, wilson_interval, Statistic,
    DEFAULT_EXCEEDANCE, Z95,
};
use quartic_nls::norms::{make_schedule, schedule_values, sobolev_norm, GoodSet, NormSchedule, ScheduleKind};
use quartic_nls::Error;

use crate::config::Config;

/// Why a command did not produce its results.
#[derive(Debug)]
pub enum Failure {
    Config(Vec<String>),
    Acceptance { failed: Vec<u8>, artifacts: Vec<Artifact> },
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::InvalidGrid(_) | Error::ScheduleConstraint { .. } | Error::NotAdmissible(_) => {
                Failure::Config(vec![e.to_string()])
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

pub type Output = Result<(Vec<Artifact>, serde_json::Value), Failure>;

fn need_dim(cfg: &Config, min: usize, what: &str) -> Result<(), Failure> {
    if cfg.dim < min {
        return Err(Failure::Config(vec![format!("dim: {what} needs d >= {min}, got {}", cfg.dim)]));
    }
    Ok(())
}

pub fn validate(criteria: &[u8], echo: bool) -> Output {
    let results = run_suite(criteria, |r| {
        if echo {
            match r {
                Ok(o) => println!("{}", o.line()),
                Err(e) => println!("FAIL criterion error: {e}"),
            }
        }
    });
    let mut artifacts = Vec::new();
    let mut lines = String::new();
    let mut outcomes: Vec<&Outcome> = Vec::new();
    let mut failed = Vec::new();
    for (id, r) in criteria.iter().zip(&results) {
        match r {
            Ok(o) => {
                writeln!(lines, "{}", o.line()).ok();
                if !o.passed {
                    failed.push(*id);
                }
                artifacts.extend(o.artifacts.iter().cloned());
                outcomes.push(o);
            }
            Err(e) => {
                writeln!(lines, "FAIL criterion {id:>2}: error {e}").ok();
                failed.push(*id);
            }
        }
    }
    artifacts.push(Artifact::text("acceptance.txt", lines));
    let summary = serde_json::json!({"outcomes": outcomes, "failed": failed});
    artifacts.push(Artifact::json("acceptance.json", &summary));
    if failed.is_empty() {
        Ok((artifacts, summary))
    } else {
        // Failed gates still leave their evidence on disk.
        Err(Failure::Acceptance { failed, artifacts })
    }
}

pub fn simulate(cfg: &Config) -> Output {
    let spec = cfg.ensemble();
    let ev = spec.evolution;
    let phi = spec.sampler()?.sample(cfg.sample)?;
    let grid = cfg.grid();
    let z = Propagator::new(grid, ev.phase_sign).linear_trajectory(&phi, 0.0, ev.dt, ev.steps)?;
    let u = if cfg.nonlinear { Some(solve_direct(&phi, &ev)?) } else { None };

    let mut csv = String::from("t,z_l2,z_hs");
    if u.is_some() {
        csv.push_str(",u_l2,u_hs,v_l2,v_hs");
    }
    csv.push('\n');
    for m in 0..=ev.steps {
        let zf = &z.fields()[m];
        write!(csv, "{:e},{:e},{:e}", m as f64 * ev.dt, zf.l2_norm(), sobolev_norm(zf, cfg.s, false)).ok();
        if let Some(u) = &u {
            let uf = &u.fields()[m];
            let v = uf - zf;
            write!(
                csv,
                ",{:e},{:e},{:e},{:e}",
                uf.l2_norm(),
                sobolev_norm(uf, cfg.s, false),
                v.l2_norm(),
                sobolev_norm(&v, cfg.s, false)
            )
            .ok();
        }
        csv.push('\n');
    }
    let mut summary = serde_json::json!({
        "sample": cfg.sample,
        "nonlinear": cfg.nonlinear,
        "data_hs": sobolev_norm(&phi, cfg.s, false),
    });
    if cfg.dim >= 3 {
        let schedule = make_schedule(ScheduleKind::S0, cfg.dim, cfg.delta)?;
        summary["z_strichartz"] = serde_json::json!(schedule_entries_json(&schedule, &schedule_values(&z, &schedule, cfg.s)?));
    }
    let artifacts = vec![
        Artifact::text("simulate.csv", csv),
        Artifact::json("simulate.json", &json_report("simulate", &spec, &summary)),
    ];
    Ok((artifacts, summary))
}

fn schedule_entries_json(schedule: &NormSchedule, values: &[f64]) -> Vec<serde_json::Value> {
    schedule
        .entries()
        .zip(values)
        .map(|(e, v)| serde_json::json!({"q": e.q.value(), "r": e.r.value(), "w": e.w(), "value": v}))
        .collect()
}

fn curve_csv(values: &[f64], lambdas: &[f64]) -> String {
    let n = values.len();
    let mut out = String::from("lambda,p,lo,hi\n");
    for (l, k) in lambdas.iter().zip(exceedance(values, lambdas)) {
        let (lo, hi) = wilson_interval(k, n, Z95);
        writeln!(out, "{l:e},{:e},{lo:e},{hi:e}", k as f64 / n as f64).ok();
    }
    out
}

pub fn ensemble(cfg: &Config) -> Output {
    need_dim(cfg, 3, "the good-set statistic")?;
    let mut spec = cfg.ensemble();
    spec.statistics = vec![Statistic::Sobolev { s: cfg.s }, Statistic::GoodSet { kind: GoodSet::ER, s: cfg.s }];
    let table = record_statistics(&spec, cfg.delta)?;
    let mut csv = String::from("sample,hs,er\n");
    for (i, row) in table.rows.iter().enumerate() {
        writeln!(csv, "{i},{:e},{:e}", row[0], row[1]).ok();
    }
    let (hs, er) = (table.column(0), table.column(1));
    let (hi, lo) = DEFAULT_EXCEEDANCE;
    let hs_fit = tail_fit(&hs, &lambda_grid(&hs, hi, lo, 12))?;
    let er_lambdas = lambda_grid(&er, hi, lo, 12);
    let summary = serde_json::json!({"hs_tail": hs_fit, "er_lambdas": er_lambdas});
    let artifacts = vec![
        Artifact::text("ensemble.csv", csv),
        Artifact::text("hs_tail.csv", hs_fit.to_csv()),
        Artifact::text("er_tail.csv", curve_csv(&er, &er_lambdas)),
        Artifact::json("ensemble.json", &json_report("ensemble", &spec, &summary)),
    ];
    Ok((artifacts, summary))
}

pub fn norms(cfg: &Config) -> Output {
    need_dim(cfg, 3, "the Strichartz schedule")?;
    let schedule = make_schedule(ScheduleKind::S0, cfg.dim, cfg.delta)?;
    let mut spec = cfg.ensemble();
    spec.statistics = vec![Statistic::Sobolev { s: cfg.s }];
    let mut csv = String::from("sample,hs");
    for e in schedule.entries() {
        spec.statistics.push(Statistic::Mixed { q: e.q.value(), r: e.r.value(), w: e.w(), s: cfg.s });
        write!(csv, ",L^{}_t L^{}_x w={}", e.q, e.r, e.w()).ok();
    }
    csv.push('\n');
    let table = record_statistics(&spec, cfg.delta)?;
    for (i, row) in table.rows.iter().enumerate() {
        write!(csv, "{i}").ok();
        for v in row {
            write!(csv, ",{v:e}").ok();
        }
        csv.push('\n');
    }
    let medians: Vec<f64> = (0..spec.statistics.len())
        .map(|j| quartic_nls::experiments::median(&table.column(j)))
        .collect();
    let summary = serde_json::json!({
        "hs_median": medians[0],
        "entries": schedule_entries_json(&schedule, &medians[1..]),
    });
    let artifacts = vec![
        Artifact::text("norms.csv", csv),
        Artifact::json("norms.json", &json_report("norms", &spec, &summary)),
    ];
    Ok((artifacts, summary))
}

pub fn scaling(cfg: &Config) -> Output {
    need_dim(cfg, 4, "the dilation study")?;
    let spec = cfg.ensemble();
    let report = dilation_study(&spec, &cfg.mus, cfg.s, cfg.eta, cfg.delta, 0.1)?;
    let mut csv = String::from("mu,complement,sigma,median\n");
    for r in &report.rows {
        writeln!(csv, "{:e},{:e},{:e},{:e}", r.mu, r.complement, r.sigma, r.median).ok();
    }
    let summary = serde_json::json!({
        "slope": report.slope,
        "expected_slope": report.expected_slope,
        "monotone": report.monotone,
        "mu_threshold": report.mu_threshold,
    });
    let artifacts = vec![
        Artifact::text("scaling.csv", csv),
        Artifact::json("scaling.json", &json_report("scaling", &spec, &report)),
    ];
    Ok((artifacts, summary))
}
