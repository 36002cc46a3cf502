//! Comparison kernels: single-variable slice sampling with stepping out and
//! shrinkage, and elliptical slice sampling in its standard and latent-slice
//! forms.

mod elliptical;
mod stepping_out;

pub use elliptical::{
    ellipse_point, elliptical_step, wrap_angle, EllipseState, EllipseStepReport, EllipticalConfig,
    EllipticalVariant, LowerTriangular,
};
pub use stepping_out::{
    gibbs_sweep_slice, initial_bracket, slice_step_1d, stepping_out, SliceStep1d,
    SteppingOutConfig, SteppingOutSampler,
};

use crate::error::{Error, Result};
use crate::rng::UniformSource;
use crate::scalar::Scalar;

/// Scalar shrinkage on `(lo, hi)` toward `anchor`; returns the accepted point
/// and the number of proposals.
pub(crate) fn shrink_1d<T, U, F>(
    src: &mut U,
    mut lo: T,
    mut hi: T,
    anchor: T,
    mut in_slice: F,
    max_iters: usize,
) -> Result<(T, usize)>
where
    T: Scalar,
    U: UniformSource + ?Sized,
    F: FnMut(T) -> bool,
{
    for n in 1..=max_iters {
        let t = lo + (hi - lo) * T::of(src.next_unit());
        if in_slice(t) {
            return Ok((t, n));
        }
        if t < anchor {
            lo = t;
        } else {
            hi = t;
        }
    }
    Err(Error::ShrinkStall {
        proposals: max_iters,
    })
}
