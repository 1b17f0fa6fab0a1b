//! Pseudospectral simulation and Monte Carlo tools for the fourth-order
//! Schrödinger equation with derivative nonlinearity
//! `i u_t + Δ²u = ± ∂(|u|²u)` and Wiener-randomized initial data.

pub mod error;
pub mod evolution;
pub mod experiments;
pub mod norms;
pub mod randomization;
pub mod spectral;

pub use error::{Error, Result};
