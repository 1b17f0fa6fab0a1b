//! Wiener randomization of initial data over unit (or dilated) frequency cubes.

mod coefficients;
mod dilation;
mod mgf;
pub mod partition;
mod randomize;
mod sample_spec;

pub use coefficients::{mix_seed, CoefficientLaw, Coefficients, RandomCoefficientModel};
pub use dilation::dilate_field;
pub use mgf::{mgf_bound_check, MgfReport, MgfRow};
pub use partition::{CubeSet, PartitionFunction, Smoothstep};
pub use randomize::{randomize, randomize_dilated, square_weight};
pub use sample_spec::SobolevSampleSpec;
