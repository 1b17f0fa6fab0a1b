use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// Snapshots `f(t_0 + m dt)`, `m = 0..=M`, on one grid.
///
/// `dt` is negative for runs backward in time; quadrature uses `|dt|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    grid: Grid,
    t0: f64,
    dt: f64,
    fields: Vec<SpectralField>,
}

impl Trajectory {
    pub fn new(grid: Grid, t0: f64, dt: f64, fields: Vec<SpectralField>) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::param("dt", format!("time step must be finite and nonzero, got {dt}")));
        }
        for f in &fields {
            grid.check_same(f.grid(), "trajectory snapshot")?;
        }
        Ok(Self { grid, t0, dt, fields })
    }

    /// The all-zero trajectory with `steps + 1` snapshots.
    pub fn zeros(grid: Grid, t0: f64, dt: f64, steps: usize) -> Result<Self> {
        Self::new(grid, t0, dt, vec![SpectralField::zeros(grid); steps + 1])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    /// Number of steps `M`.
    pub fn steps(&self) -> usize {
        self.fields.len() - 1
    }

    pub fn time(&self, m: usize) -> f64 {
        self.t0 + m as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|m| self.time(m)).collect()
    }

    pub fn window(&self) -> (f64, f64) {
        (self.t0, self.time(self.steps()))
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn into_fields(self) -> Vec<SpectralField> {
        self.fields
    }

    pub fn last(&self) -> &SpectralField {
        self.fields.last().expect("non-empty")
    }

    /// Snapshots `start..=end`.
    pub fn restrict(&self, start: usize, end: usize) -> Result<Self> {
        if start > end || end >= self.len() {
            return Err(Error::param("range", format!("{start}..={end} outside 0..{}", self.len())));
        }
        Self::new(self.grid, self.time(start), self.dt, self.fields[start..=end].to_vec())
    }

    /// Pointwise `a * self`.
    pub fn scale(&self, a: num_complex::Complex64) -> Self {
        Self {
            fields: self.fields.iter().map(|f| f.scale(a)).collect(),
            ..self.clone()
        }
    }

    /// Pointwise difference on the same time lattice.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            fields: self.fields.iter().zip(&other.fields).map(|(a, b)| a - b).collect(),
            ..self.clone()
        })
    }

    /// Pointwise sum on the same time lattice.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            fields: self.fields.iter().zip(&other.fields).map(|(a, b)| a + b).collect(),
            ..self.clone()
        })
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        self.grid.check_same(&other.grid, "trajectory")?;
        if self.len() != other.len() || self.t0 != other.t0 || self.dt != other.dt {
            return Err(Error::GridMismatch(format!(
                "time lattices differ: ({}, {}, {}) vs ({}, {}, {})",
                self.t0,
                self.dt,
                self.len(),
                other.t0,
                other.dt,
                other.len()
            )));
        }
        Ok(())
    }
}
