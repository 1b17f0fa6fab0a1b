//! Run configuration: a TOML file overlaid by command-line flags.
//!
//! Every key is optional. Precedence is flag > file > built-in default, and
//! the resolved values (not the inputs) are what the manifest echoes.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use quartic_nls::evolution::{no_wrap_check, EvolutionConfig, NonlinearSign};
use quartic_nls::experiments::acceptance::SEED;
use quartic_nls::experiments::{DataSource, EnsembleSpec};
use quartic_nls::norms::{default_delta, make_schedule, ScheduleKind};
use quartic_nls::randomization::{CoefficientLaw, SobolevSampleSpec};
use quartic_nls::spectral::{Derivative, Grid, PhaseSign};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    Gaussian,
    Bernoulli,
}

/// `x1` is `d/dx_1`, `abs` is `|grad|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DerivativeArg {
    X1,
    Abs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SignArg {
    Plus,
    Minus,
}

/// Raw settings. Field names double as TOML keys and `--kebab-case` flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Spatial dimension d.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Points per axis.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    /// Box is [-L, L)^d.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    /// Sobolev index of the statistics.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Decay of the base data, |phi^(xi)| ~ <xi>^-alpha.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Distribution>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Sample index used by `simulate`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<usize>,
    /// Time window T.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derivative: Option<DerivativeArg>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<SignArg>,
    /// Sign in S(t) = exp(+-i t |xi|^4); `minus` is the default.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_sign: Option<SignArg>,
    /// `false` switches the nonlinearity off.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonlinear: Option<bool>,
    /// Dilation factors for `scaling`, powers of 1/2.
    #[arg(long = "mu", value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mus: Option<Vec<f64>>,
    /// Good-set threshold for `scaling`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

/// One flag that replaced a file value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Override {
    pub key: String,
    pub file: Value,
    pub flag: Value,
}

fn to_map(s: &Settings) -> Map<String, Value> {
    match serde_json::to_value(s).expect("plain data") {
        Value::Object(m) => m,
        _ => unreachable!(),
    }
}

/// Overlays `flags` on `file`, returning the merge and what was replaced.
pub fn merge(file: &Settings, flags: &Settings) -> (Settings, Vec<Override>) {
    let mut merged = to_map(file);
    let mut overrides = Vec::new();
    for (key, value) in to_map(flags) {
        if let Some(old) = merged.get(&key) {
            if *old != value {
                overrides.push(Override {
                    key: key.clone(),
                    file: old.clone(),
                    flag: value.clone(),
                });
            }
        }
        merged.insert(key, value);
    }
    let settings = serde_json::from_value(Value::Object(merged)).expect("round trip of the same type");
    (settings, overrides)
}

pub fn read_file(path: &Path) -> Result<Settings, Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| vec![format!("{}: {e}", path.display())])?;
    toml::from_str(&text).map_err(|e| vec![format!("{}: {e}", path.display())])
}

/// Fully resolved configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub dim: usize,
    pub grid: usize,
    pub half_width: f64,
    pub s: f64,
    pub delta: f64,
    pub alpha: f64,
    pub amplitude: f64,
    pub distribution: Distribution,
    pub seed: u64,
    pub samples: usize,
    pub sample: usize,
    pub window: f64,
    pub dt: f64,
    pub steps: usize,
    pub derivative: DerivativeArg,
    pub sign: SignArg,
    pub phase_sign: SignArg,
    pub nonlinear: bool,
    pub mus: Vec<f64>,
    pub eta: f64,
    pub output_dir: PathBuf,
    /// Keys that fell back to built-in defaults.
    pub defaulted: Vec<&'static str>,
}

impl Config {
    /// Fills defaults and checks every constraint, reporting all violations.
    pub fn resolve(s: &Settings) -> Result<Config, Vec<String>> {
        let mut defaulted = Vec::new();
        macro_rules! get {
            ($field:ident, $default:expr) => {
                match s.$field.clone() {
                    Some(v) => v,
                    None => {
                        defaulted.push(stringify!($field));
                        $default
                    }
                }
            };
        }
        let dim = get!(dim, 3);
        let window = get!(window, 0.25);
        let mut cfg = Config {
            dim,
            grid: get!(grid, 32),
            half_width: get!(half_width, 16.0),
            s: get!(s, 0.0),
            delta: get!(delta, default_delta(dim)),
            alpha: get!(alpha, 2.0),
            amplitude: get!(amplitude, 1.0),
            distribution: get!(distribution, Distribution::Gaussian),
            seed: get!(seed, SEED),
            samples: get!(samples, 256),
            sample: get!(sample, 0),
            window,
            dt: get!(dt, window / 16.0),
            steps: 0,
            derivative: get!(derivative, DerivativeArg::X1),
            sign: get!(sign, SignArg::Plus),
            phase_sign: get!(phase_sign, SignArg::Minus),
            nonlinear: get!(nonlinear, true),
            mus: get!(mus, vec![1.0, 0.5, 0.25]),
            eta: get!(eta, 1.0),
            output_dir: get!(output_dir, PathBuf::from("qnls-out")),
            defaulted: Vec::new(),
        };
        cfg.defaulted = defaulted;

        let mut errors = Vec::new();
        let grid = Grid::new(cfg.dim, cfg.grid, cfg.half_width);
        if let Err(e) = &grid {
            errors.push(format!("grid: {e}"));
        }
        if cfg.samples < 2 {
            errors.push(format!("samples: need at least 2, got {}", cfg.samples));
        } else if cfg.sample >= cfg.samples {
            errors.push(format!("sample: index {} is not below samples = {}", cfg.sample, cfg.samples));
        }
        if !(cfg.window > 0.0 && cfg.window.is_finite()) {
            errors.push(format!("window: must be positive, got {}", cfg.window));
        }
        if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
            errors.push(format!("dt: must be positive, got {}", cfg.dt));
        } else if cfg.window > 0.0 {
            let steps = (cfg.window / cfg.dt).round();
            if steps < 1.0 || (steps * cfg.dt - cfg.window).abs() > 1e-9 * cfg.window {
                errors.push(format!("dt: {} does not divide the window {}", cfg.dt, cfg.window));
            } else {
                cfg.steps = steps as usize;
            }
        }
        if !(cfg.amplitude > 0.0 && cfg.amplitude.is_finite()) {
            errors.push(format!("amplitude: must be positive, got {}", cfg.amplitude));
        }
        let data = SobolevSampleSpec::new(cfg.alpha);
        if let Err(e) = &data {
            errors.push(format!("alpha: {e}"));
        }
        if cfg.dim >= 3 {
            for kind in [ScheduleKind::S0, ScheduleKind::S0Prime, ScheduleKind::X] {
                if let Err(e) = make_schedule(kind, cfg.dim, cfg.delta) {
                    errors.push(format!("delta = {} ({kind:?} schedule): {e}", cfg.delta));
                }
            }
        }
        if cfg.mus.iter().any(|mu| !(*mu > 0.0 && *mu <= 1.0 && mu.log2().fract() == 0.0)) {
            errors.push(format!("mu: each factor must be 2^-m, got {:?}", cfg.mus));
        }
        if !(cfg.eta > 0.0) {
            errors.push(format!("eta: must be positive, got {}", cfg.eta));
        }
        if let (Ok(grid), Ok(data), true) = (&grid, &data, cfg.steps > 0) {
            let phi = data.with_amplitude(cfg.amplitude).field(grid);
            let check = no_wrap_check(&phi, cfg.window);
            if !check.ok {
                errors.push(format!(
                    "half_width: window {} exceeds the no-wrap horizon {:.4} (group speed {:.3e} in band N = {}); enlarge L or shorten T",
                    cfg.window, check.horizon, check.speed, check.band
                ));
            }
        }
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(errors)
        }
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.dim, self.grid, self.half_width).expect("validated")
    }

    pub fn evolution(&self) -> EvolutionConfig {
        let mut ev = EvolutionConfig::new(self.dt, self.steps);
        ev.derivative = match self.derivative {
            DerivativeArg::X1 => Derivative::Coordinate(0),
            DerivativeArg::Abs => Derivative::Radial,
        };
        ev.sign = match self.sign {
            SignArg::Plus => NonlinearSign::Plus,
            SignArg::Minus => NonlinearSign::Minus,
        };
        ev.phase_sign = match self.phase_sign {
            SignArg::Plus => PhaseSign::Positive,
            SignArg::Minus => PhaseSign::Negative,
        };
        ev.nonlinear = self.nonlinear;
        ev.picard.delta = self.delta;
        ev
    }

    pub fn ensemble(&self) -> EnsembleSpec {
        let data = SobolevSampleSpec::new(self.alpha).expect("validated").with_amplitude(self.amplitude);
        let mut spec = EnsembleSpec::new(self.samples, self.seed, DataSource::Sobolev(data), self.grid(), self.evolution());
        spec.law = match self.distribution {
            Distribution::Gaussian => CoefficientLaw::Gaussian,
            Distribution::Bernoulli => CoefficientLaw::Bernoulli,
        };
        spec
    }
}
