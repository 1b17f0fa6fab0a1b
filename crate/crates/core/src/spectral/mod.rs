//! Periodic grids, the Fourier transform, multipliers and frequency projections.

mod field;
mod grid;
mod multiplier;
mod projection;
pub mod snapshot;
mod transform;

pub use field::{PhysicalField, SpectralField};
pub use grid::{Grid, Lattice, MAX_DIM};
pub use multiplier::{apply_multiplier, Derivative, Multiplier, PhaseSign};
pub(crate) use multiplier::{bessel, homogeneous};
pub use projection::{cube_project, dealias, dyadic_project, DyadicPartition};
pub(crate) use projection::dealias_mask;
pub use transform::FourierTransform;
