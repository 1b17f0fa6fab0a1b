//! The free flow, the nonlinearity, a direct integrator and the Duhamel
//! iteration for the perturbed equation.

mod config;
mod horizon;
mod nonlinearity;
mod picard;
mod propagator;
mod scattering;
mod stepper;

pub use config::{EvolutionConfig, NonlinearSign, PicardConfig};
pub use horizon::{
    dilation_scale_threshold, eta_from_constants, eta_is_admissible, local_time_horizon, NonlinearConstants,
    SmallnessRegime,
};
pub use nonlinearity::Nonlinearity;
pub use picard::{
    iteration_norm, picard_iterate, solve_perturbed, BandTrajectory, PerturbedSolution, PicardDiagnostics,
};
pub use propagator::{propagate, Propagator};
pub use scattering::{no_wrap_check, scattering_state, scattering_state_band, NoWrap, ScatteringState};
pub use stepper::{solve_direct, step_direct, Stepper, BLOW_UP_FACTOR};
