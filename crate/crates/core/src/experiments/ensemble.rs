use rayon::prelude::*;
use std::sync::atomic::{AtomicUsize, Ordering};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::EvolutionConfig;
use crate::norms::GoodSet;
use crate::randomization::{randomize, CoefficientLaw, CubeSet, PartitionFunction, RandomCoefficientModel, SobolevSampleSpec};
use crate::spectral::{Grid, SpectralField};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "RDNLS_WORKERS";

/// Deterministic data before randomization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSource {
    Sobolev(SobolevSampleSpec),
    /// A field given directly, e.g. read from a snapshot file.
    #[serde(skip)]
    Field(SpectralField),
}

/// A per-sample quantity the ensemble runner can record.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "statistic", rename_all = "snake_case")]
pub enum Statistic {
    /// `||phi^omega||_{H^s}`.
    Sobolev { s: f64 },
    /// `||<grad>^s |grad|^w S(t) phi^omega||_{L^q_t L^r_x}` over the window.
    Mixed { q: f64, r: f64, w: f64, s: f64 },
    /// Good-set statistic over the window.
    GoodSet { kind: GoodSet, s: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub samples: usize,
    pub seed: u64,
    pub data: DataSource,
    pub grid: Grid,
    pub law: CoefficientLaw,
    /// Smoothness order of the partition generator.
    pub partition_order: u32,
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub statistics: Vec<Statistic>,
}

impl EnsembleSpec {
    pub fn new(samples: usize, seed: u64, data: DataSource, grid: Grid, evolution: EvolutionConfig) -> Self {
        Self {
            samples,
            seed,
            data,
            grid,
            law: CoefficientLaw::Gaussian,
            partition_order: 3,
            evolution,
            statistics: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::param("samples", format!("need at least 2, got {}", self.samples)));
        }
        self.law.validate()?;
        self.evolution.validate(self.grid.dim())?;
        if let DataSource::Field(f) = &self.data {
            self.grid.check_same(f.grid(), "ensemble data")?;
        }
        Ok(())
    }

    pub fn base_field(&self) -> SpectralField {
        match &self.data {
            DataSource::Sobolev(spec) => spec.field(&self.grid),
            DataSource::Field(f) => f.clone(),
        }
    }

    pub fn model(&self) -> RandomCoefficientModel {
        RandomCoefficientModel {
            law: self.law.clone(),
            seed: self.seed,
        }
    }

    pub fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        Sampler::new(self.base_field(), self.model(), self.partition_order)
    }
}

/// Draws `phi^omega` for ensemble members; cheap to share across threads.
#[derive(Clone, Debug)]
pub struct Sampler {
    phi: SpectralField,
    model: RandomCoefficientModel,
    psi: PartitionFunction,
    cubes: CubeSet,
}

impl Sampler {
    pub fn new(phi: SpectralField, model: RandomCoefficientModel, order: u32) -> Result<Self> {
        let psi = PartitionFunction::new(order, phi.grid().dim(), 1.0)?;
        let cubes = psi.cubes_for(phi.grid())?;
        Ok(Self { phi, model, psi, cubes })
    }

    pub fn base(&self) -> &SpectralField {
        &self.phi
    }

    /// `phi^omega` for member `index`.
    pub fn sample(&self, index: usize) -> Result<SpectralField> {
        let g = self.model.for_sample(index as u64).sample(&self.cubes);
        randomize(&self.phi, &self.psi, &g)
    }
}

static WORKER_OVERRIDE: AtomicUsize = AtomicUsize::new(0);

/// Runs `f` with the worker count pinned to `n`, ignoring `RDNLS_WORKERS`.
///
/// The override is process-wide; nested or concurrent calls see the
/// innermost value.
pub fn with_workers<T>(n: usize, f: impl FnOnce() -> T) -> T {
    let previous = WORKER_OVERRIDE.swap(n.max(1), Ordering::SeqCst);
    let out = f();
    WORKER_OVERRIDE.store(previous, Ordering::SeqCst);
    out
}

/// Worker count from `RDNLS_WORKERS`, falling back to the available cores.
pub fn workers() -> usize {
    let pinned = WORKER_OVERRIDE.load(Ordering::SeqCst);
    if pinned > 0 {
        return pinned;
    }
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `task(i)` for `i in 0..count` on `workers()` threads.
///
/// Results come back in index order, so any reduction over them is
/// independent of the worker count.
pub fn run_indexed<T, F>(count: usize, task: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    run_indexed_with(workers(), count, task)
}

pub fn run_indexed_with<T, F>(threads: usize, count: usize, task: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if threads <= 1 {
        return (0..count).map(task).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(|| (0..count).into_par_iter().map(task).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_independent_of_threads() {
        let a = run_indexed_with(1, 50, |i| i * i);
        let b = run_indexed_with(3, 50, |i| i * i);
        assert_eq!(a, b);
    }

    #[test]
    fn samples_are_reproducible() {
        let grid = Grid::new(2, 16, 4.0).unwrap();
        let spec = EnsembleSpec::new(
            4,
            11,
            DataSource::Sobolev(SobolevSampleSpec::new(2.0).unwrap()),
            grid,
            EvolutionConfig::new(0.01, 4),
        );
        let s = spec.sampler().unwrap();
        assert_eq!(s.sample(2).unwrap(), s.sample(2).unwrap());
        assert_ne!(s.sample(2).unwrap(), s.sample(3).unwrap());
    }
}
