//! Gibbs samplers that compose the kernels into full posterior analyses.

mod finite_mixture;
mod gp;
mod mdp;
mod spike_slab;
mod state_space;

pub use finite_mixture::{
    FiniteMixture, FiniteMixtureConfig, FiniteMixtureOutput, FiniteMixtureState, MixtureCandidates,
};
pub use gp::{gp_regression_run, GpRunOutput};
pub use mdp::{normal_mean_conditional, Mdp, MdpConfig, MdpHyper, MdpOutput, StickBreakingState};
pub use spike_slab::spike_slab_run;
pub use state_space::{state_space_run, theta_conditional, StateSpaceOutput};
