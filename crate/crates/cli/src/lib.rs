//! `qnls`: runs studies from a TOML file and/or flags, writing CSV/JSON
//! results plus a `manifest.json` with SHA-256 digests.
//!
//! Exit codes: 0 success, 1 configuration error, 2 acceptance failure,
//! 3 runtime failure. The worker count comes from `RDNLS_WORKERS`.

pub mod commands;
pub mod config;
pub mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use commands::Failure;
use config::{merge, read_file, Config, Settings};
use manifest::{commit, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_ACCEPTANCE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qnls", version, about = "Randomized-data experiments for the fourth-order derivative NLS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML file with any of the flag names as keys (underscored).
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the acceptance suite.
    Validate {
        /// Subset of criteria, e.g. `1,2,7`.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u8>>,
        #[command(flatten)]
        common: Common,
    },
    /// One solve of one randomized sample.
    Simulate(Common),
    /// H^s and E_R statistics over an ensemble, with tail curves.
    Ensemble(Common),
    /// Per-sample Strichartz norms of the free evolution.
    Norms(Common),
    /// Dilation study (d >= 4).
    Scaling(Common),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Simulate(_) => "simulate",
            Command::Ensemble(_) => "ensemble",
            Command::Norms(_) => "norms",
            Command::Scaling(_) => "scaling",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Validate { common, .. } => common,
            Command::Simulate(c) | Command::Ensemble(c) | Command::Norms(c) | Command::Scaling(c) => c,
        }
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let common = cli.command.common();
    let file = match &common.config {
        Some(p) => match read_file(p) {
            Ok(s) => s,
            Err(errors) => return config_error(&errors),
        },
        None => Settings::default(),
    };
    let (settings, overrides) = merge(&file, &common.settings);
    let cfg = match Config::resolve(&settings) {
        Ok(c) => c,
        Err(errors) => return config_error(&errors),
    };
    for o in &overrides {
        eprintln!("override {}: {} -> {}", o.key, o.file, o.flag);
    }

    let started = Instant::now();
    let result = match &cli.command {
        Command::Validate { criteria, .. } => {
            let ids = criteria.clone().unwrap_or_else(|| (1..=12).collect());
            if let Some(bad) = ids.iter().find(|id| !(1..=12).contains(*id)) {
                return config_error(&[format!("criteria: {bad} is not in 1..=12")]);
            }
            commands::validate(&ids, true)
        }
        Command::Simulate(_) => commands::simulate(&cfg),
        Command::Ensemble(_) => commands::ensemble(&cfg),
        Command::Norms(_) => commands::norms(&cfg),
        Command::Scaling(_) => commands::scaling(&cfg),
    };
    let manifest = RunManifest::new(cli.command.name(), &cfg, &overrides);
    let (artifacts, code) = match result {
        Ok((artifacts, _)) => (artifacts, EXIT_OK),
        Err(Failure::Acceptance { failed, artifacts }) => {
            eprintln!("acceptance failed: criteria {failed:?}");
            (artifacts, EXIT_ACCEPTANCE)
        }
        Err(Failure::Config(errors)) => return config_error(&errors),
        Err(Failure::Runtime(e)) => {
            eprintln!("runtime failure: {e}");
            return EXIT_RUNTIME;
        }
    };
    match commit(&cfg.output_dir, &artifacts, manifest, started) {
        Ok(m) => {
            println!("wrote {} files to {} (digest {})", m.files.len(), cfg.output_dir.display(), m.digest);
            code
        }
        Err(e) => {
            eprintln!("could not write results to {}: {e}", cfg.output_dir.display());
            EXIT_RUNTIME
        }
    }
}

fn config_error(errors: &[String]) -> i32 {
    eprintln!("configuration rejected:");
    for e in errors {
        eprintln!("  - {e}");
    }
    EXIT_CONFIG
}
