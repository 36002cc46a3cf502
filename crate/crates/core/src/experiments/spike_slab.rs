use crate::chain::{ChainOutput, RunLength};
use crate::error::Result;
use crate::latent::{LatentSliceConfig, LatentSliceSampler};
use crate::models::SpikeSlab;
use crate::rng::RngState;

/// Latent slice sampling of the full coefficient vector from `beta = 0`.
pub fn spike_slab_run(
    model: &SpikeSlab,
    run: RunLength,
    config: LatentSliceConfig<f64>,
    rng: &mut RngState,
) -> Result<ChainOutput<f64>> {
    let sampler = LatentSliceSampler::new(config)?;
    sampler.run_chain(
        model,
        vec![0.0; model.data.p],
        run.n_iter,
        run.burn_in,
        run.thin,
        rng,
    )
}
