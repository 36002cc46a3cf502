//! Latent slice sampling: a multivariate slice sampler whose interval widths
//! are auxiliary variables, an exact discrete analogue on the integers, the
//! classical stepping-out and elliptical slice samplers for comparison, and
//! Gibbs drivers for a set of Bayesian models.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod catalog;
pub mod chain;
pub mod density;
pub mod diagnostics;
pub mod discrete;
pub mod error;
pub mod experiments;
pub mod io;
pub mod latent;
pub mod models;
pub mod rng;
pub mod scalar;

pub use baseline::{
    elliptical_step, slice_step_1d, stepping_out, EllipseState, EllipticalConfig,
    EllipticalVariant, LowerTriangular, SteppingOutConfig, SteppingOutSampler,
};
pub use catalog::{run_experiment, ExperimentConfig, ExperimentName, ExperimentRun};
pub use chain::{ChainOutput, RunLength};
pub use density::{FnDensity, LogDensity};
pub use discrete::{
    detailed_balance_residual, discrete_step, transition_probability, DiscreteTarget, FnTarget,
    TabulatedPmf,
};
pub use error::{Error, Result};
pub use latent::{LatentSliceConfig, LatentSliceSampler, LatentState};
pub use rng::{RngState, UniformSource};
pub use scalar::{Field, Scalar};

pub type LatentSlice64 = LatentSliceSampler<f64>;
pub type LatentSlice32 = LatentSliceSampler<f32>;
pub type LatentState64 = LatentState<f64>;
pub type LatentState32 = LatentState<f32>;
pub type ChainOutput64 = ChainOutput<f64>;
pub type ChainOutput32 = ChainOutput<f32>;
pub type SteppingOut64 = SteppingOutSampler<f64>;
pub type TabulatedPmf64 = TabulatedPmf<f64>;
