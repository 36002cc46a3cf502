use std::time::Instant;

use crate::baseline::{elliptical_step, EllipseState, EllipticalConfig};
use crate::chain::{ChainOutput, RunLength};
use crate::error::Result;
use crate::models::GpRegression;
use crate::rng::RngState;

#[derive(Debug, Clone, PartialEq)]
pub struct GpRunOutput {
    /// Retained draws of the latent function values.
    pub samples: ChainOutput<f64>,
    /// Pointwise posterior mean over the retained draws.
    pub posterior_mean: Vec<f64>,
    pub rmse: f64,
    /// Accepted angle at every iteration, wrapped to `[-pi, pi]`.
    pub thetas: Vec<f64>,
}

/// Runs elliptical slice sampling on the GP posterior from `f = 0`.
pub fn gp_regression_run(
    model: &GpRegression,
    cfg: &EllipticalConfig<f64>,
    run: RunLength,
    rng: &mut RngState,
) -> Result<GpRunOutput> {
    let start = Instant::now();
    let chol = model.cholesky()?;
    let log_lik = |f: &[f64]| model.log_likelihood(f);
    let mut state = EllipseState::new(vec![0.0; model.dim()], log_lik)?;
    let mut samples = ChainOutput::with_capacity(model.dim(), run.n_kept(), run.n_iter);
    let mut thetas = Vec::with_capacity(run.n_iter);
    for it in 1..=run.n_iter {
        let report = elliptical_step(&mut state, &chol, log_lik, cfg, rng)?;
        samples.shrink_counts.push(report.proposals);
        thetas.push(report.theta);
        if run.keeps(it) {
            samples.push(it, state.f());
        }
    }
    samples.wall_time = start.elapsed().as_secs_f64();
    let posterior_mean: Vec<f64> = (0..model.dim())
        .map(|j| crate::diagnostics::mean(&samples.column(j)))
        .collect();
    let rmse = model.rmse_to_truth(&posterior_mean);
    Ok(GpRunOutput {
        samples,
        posterior_mean,
        rmse,
        thetas,
    })
}
