use crate::chain::{ChainOutput, RunLength};
use crate::error::Result;
use crate::latent::{LatentSliceConfig, LatentSliceSampler};
use crate::models::StateSpace;
use crate::rng::{gamma, RngState};

/// Shape and rate of the Gamma conditional of `theta` under a Gamma(0.5, 0.5) prior.
pub fn theta_conditional(total_count: f64, x: &[f64]) -> (f64, f64) {
    (
        0.5 + total_count,
        0.5 + x.iter().map(|v| v.exp()).sum::<f64>(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceOutput {
    pub x: ChainOutput<f64>,
    /// `theta` after every iteration, burn-in included.
    pub theta: Vec<f64>,
}

/// Alternates a latent slice update of the whole state vector with a Gibbs
/// draw of `theta`. Starts from `x = 0`, `theta = 1`.
pub fn state_space_run(
    y: Vec<u64>,
    run: RunLength,
    config: LatentSliceConfig<f64>,
    rng: &mut RngState,
) -> Result<StateSpaceOutput> {
    let start = std::time::Instant::now();
    let sampler = LatentSliceSampler::new(config)?;
    let mut model = StateSpace::new(y);
    let n = model.y.len();
    let total = model.total_count();
    let mut state = sampler.initial_state(&model, vec![0.0; n])?;
    let mut x = ChainOutput::with_capacity(n, run.n_kept(), run.n_iter);
    let mut theta = Vec::with_capacity(run.n_iter);
    for it in 1..=run.n_iter {
        let report = sampler.step(&mut state, &model, rng)?;
        x.shrink_counts.push(report.proposals);
        let (shape, rate) = theta_conditional(total, state.y());
        model.theta = gamma(rng, shape, 1.0 / rate)?;
        state.refresh(&model)?;
        theta.push(model.theta);
        if run.keeps(it) {
            x.push(it, state.y());
        }
    }
    x.wall_time = start.elapsed().as_secs_f64();
    Ok(StateSpaceOutput { x, theta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_conditional_plug_in() {
        assert_eq!(theta_conditional(0.0, &vec![0.0; 500]), (0.5, 500.5));
    }

    #[test]
    fn short_run_is_finite() {
        let mut rng = RngState::new(8);
        let data = StateSpace::generate_data(&mut rng, 50, 0.8, 1.0, 1.0).unwrap();
        let run = RunLength::new(200, 100, 1).unwrap();
        let out = state_space_run(data.y, run, LatentSliceConfig::default(), &mut rng).unwrap();
        assert_eq!(out.x.n_kept(), 100);
        assert!(out.theta.iter().all(|t| t.is_finite() && *t > 0.0));
        assert!(out.x.rows().all(|r| r.iter().all(|v| v.is_finite())));
    }
}
