//! Latent slice sampler for continuous targets of any dimension.
//!
//! One iteration from the current `(y0, s0)`:
//!
//! 1. `log w = log pi(y0) + log u`; for every coordinate draw the latent
//!    centre `l_j ~ U(y0_j - s0_j/2, y0_j + s0_j/2)` and refresh the scale
//!    `s_j ~ exp(-lambda s) 1(s > 2|l_j - y0_j|)`.
//! 2. Search box `a_j = l_j - s_j/2`, `b_j = l_j + s_j/2`.
//! 3. Shrinkage: propose uniformly in the box, accept when `log pi > log w`,
//!    otherwise pull each side in toward `y0`.
//!
//! The refreshed scales are carried into the next iteration. Under the scale
//! prior `p(s) ∝ s exp(-lambda s)` their stationary law is Gamma(2, rate
//! lambda).

mod shrink;

use std::time::Instant;

pub use shrink::{shrink_sample, ShrinkBox, ShrinkOutcome};

use crate::chain::{ChainOutput, RunLength};
use crate::density::LogDensity;
use crate::error::{Error, Result};
use crate::rng::{shifted_exponential_map, UniformSource};
use crate::scalar::{half, Field, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatentSliceConfig<T> {
    /// Rate of the scale prior `p(s) ∝ s exp(-lambda s)`.
    pub lambda: T,
    pub max_shrink_iters: usize,
    /// Scale assigned to every coordinate before the first iteration.
    pub s_init: T,
}

impl<T: Scalar> Default for LatentSliceConfig<T> {
    fn default() -> Self {
        LatentSliceConfig {
            lambda: T::of(0.1),
            max_shrink_iters: 10_000,
            s_init: T::one(),
        }
    }
}

impl<T: Scalar> LatentSliceConfig<T> {
    pub fn with_lambda(lambda: T) -> Self {
        LatentSliceConfig {
            lambda,
            ..Self::default()
        }
    }

    /// Config whose scale prior is Gamma(shape 2, `scale`), i.e. `lambda = 1/scale`.
    pub fn with_gamma_scale(scale: T) -> Self {
        Self::with_lambda(T::one() / scale)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > T::zero()) || !self.lambda.is_finite() {
            return Err(Error::param("lambda", self.lambda.as_f64()));
        }
        if self.max_shrink_iters == 0 {
            return Err(Error::param("max_shrink_iters", 0.0));
        }
        if !(self.s_init > T::zero()) || !self.s_init.is_finite() {
            return Err(Error::param("s_init", self.s_init.as_f64()));
        }
        Ok(())
    }
}

/// Current position, scales and the cached log target at the position.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentState<T> {
    y: Vec<T>,
    s: Vec<T>,
    log_pi_y: T,
}

impl<T: Scalar> LatentState<T> {
    pub fn new<D: LogDensity<T> + ?Sized>(target: &D, y: Vec<T>, s_init: T) -> Result<Self> {
        let s = vec![s_init; y.len()];
        Self::with_scales(target, y, s)
    }

    pub fn with_scales<D: LogDensity<T> + ?Sized>(
        target: &D,
        y: Vec<T>,
        s: Vec<T>,
    ) -> Result<Self> {
        if y.len() != target.dim() {
            return Err(Error::DimensionMismatch {
                expected: target.dim(),
                got: y.len(),
            });
        }
        if s.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: y.len(),
                got: s.len(),
            });
        }
        if let Some(bad) = s.iter().find(|v| !(**v > T::zero())) {
            return Err(Error::InvalidState(format!("scale {bad} is not positive")));
        }
        let log_pi_y = target.log_density(&y);
        if !(log_pi_y > T::neg_infinity()) {
            return Err(Error::InvalidState(
                "initial point lies outside the support".into(),
            ));
        }
        Ok(LatentState { y, s, log_pi_y })
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn s(&self) -> &[T] {
        &self.s
    }

    pub fn log_pi_y(&self) -> T {
        self.log_pi_y
    }

    /// Recomputes the cached log target, for drivers whose target changes
    /// between steps (e.g. a Gibbs block whose conditioning values moved).
    pub fn refresh<D: LogDensity<T> + ?Sized>(&mut self, target: &D) -> Result<()> {
        let lp = target.log_density(&self.y);
        if !(lp > T::neg_infinity()) {
            return Err(Error::InvalidState(
                "current point left the support of the updated target".into(),
            ));
        }
        self.log_pi_y = lp;
        Ok(())
    }
}

/// `log_pi_y + log u`.
pub fn slice_level_map<T: Scalar>(log_pi_y: T, u: f64) -> T {
    log_pi_y + T::of(u.ln())
}

/// Log of a uniform slice level under `exp(log_pi_y)`.
pub fn sample_slice_level<T: Scalar, U: UniformSource + ?Sized>(
    src: &mut U,
    log_pi_y: T,
) -> Result<T> {
    if !log_pi_y.is_finite() {
        return Err(Error::InvalidState(format!(
            "slice level requested at log density {log_pi_y}"
        )));
    }
    Ok(slice_level_map(log_pi_y, src.next_open_unit()))
}

/// Latent centre `y - s/2 + u s`.
pub fn latent_location_map<T: Field>(y: T, s: T, u: T) -> T {
    y - s.clone() * half::<T>() + u * s
}

/// Search window `(l - s/2, l + s/2)` around a latent centre.
pub fn latent_window<T: Field>(l: T, s: T) -> (T, T) {
    let h = s * half::<T>();
    (l.clone() - h.clone(), l + h)
}

pub fn sample_latent_location<T: Scalar, U: UniformSource + ?Sized>(
    src: &mut U,
    y: T,
    s: T,
) -> Result<T> {
    if !(s > T::zero()) {
        return Err(Error::InvalidState(format!("scale {s} is not positive")));
    }
    Ok(latent_location_map(y, s, T::of(src.next_unit())))
}

/// Draws `s ∝ exp(-lambda s) 1(s > 2|l - y|)`.
pub fn sample_scale_conditional<T: Scalar, U: UniformSource + ?Sized>(
    src: &mut U,
    l: T,
    y: T,
    lambda: T,
) -> Result<T> {
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return Err(Error::param("lambda", lambda.as_f64()));
    }
    let shift = T::of(2.0) * (l - y).abs();
    Ok(shift + T::of(shifted_exponential_map(1.0, 0.0, src.next_open_unit())) / lambda)
}

/// Diagnostics of one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport<T> {
    pub log_level: T,
    pub proposals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatentSliceSampler<T> {
    pub config: LatentSliceConfig<T>,
}

impl<T: Scalar> LatentSliceSampler<T> {
    pub fn new(config: LatentSliceConfig<T>) -> Result<Self> {
        config.validate()?;
        Ok(LatentSliceSampler { config })
    }

    pub fn initial_state<D: LogDensity<T> + ?Sized>(
        &self,
        target: &D,
        init: Vec<T>,
    ) -> Result<LatentState<T>> {
        LatentState::new(target, init, self.config.s_init)
    }

    /// One full iteration; `state` is updated in place.
    pub fn step<D, U>(
        &self,
        state: &mut LatentState<T>,
        target: &D,
        src: &mut U,
    ) -> Result<StepReport<T>>
    where
        D: LogDensity<T> + ?Sized,
        U: UniformSource + ?Sized,
    {
        let d = state.y.len();
        let log_level = sample_slice_level(src, state.log_pi_y)?;

        let mut lower = Vec::with_capacity(d);
        let mut upper = Vec::with_capacity(d);
        for j in 0..d {
            let y0 = state.y[j];
            let l = sample_latent_location(src, y0, state.s[j])?;
            let s = sample_scale_conditional(src, l, y0, self.config.lambda)?;
            let (a, b) = latent_window(l, s);
            if !(a < y0 && y0 < b) {
                return Err(Error::InvalidState(format!(
                    "coordinate {j}: {y0} escaped its search window ({a}, {b})"
                )));
            }
            state.s[j] = s;
            lower.push(a);
            upper.push(b);
        }

        let mut bounds = ShrinkBox::new(lower, upper)?;
        let mut accepted_log_pi = state.log_pi_y;
        let outcome = shrink_sample(
            src,
            &mut bounds,
            &state.y,
            |y| {
                let lp = target.log_density(y);
                accepted_log_pi = lp;
                lp > log_level
            },
            self.config.max_shrink_iters,
        )?;
        state.y = outcome.point;
        state.log_pi_y = accepted_log_pi;
        Ok(StepReport {
            log_level,
            proposals: outcome.proposals,
        })
    }

    /// Runs `n_iter` iterations from `init`, keeping every `thin`-th draw
    /// after `burn_in`.
    pub fn run_chain<D, U>(
        &self,
        target: &D,
        init: Vec<T>,
        n_iter: usize,
        burn_in: usize,
        thin: usize,
        src: &mut U,
    ) -> Result<ChainOutput<T>>
    where
        D: LogDensity<T> + ?Sized,
        U: UniformSource + ?Sized,
    {
        let run = RunLength::new(n_iter, burn_in, thin)?;
        let start = Instant::now();
        let mut state = self.initial_state(target, init)?;
        let mut out = ChainOutput::with_capacity(target.dim(), run.n_kept(), n_iter);
        for it in 1..=n_iter {
            let report = self.step(&mut state, target, src)?;
            out.shrink_counts.push(report.proposals);
            if run.keeps(it) {
                out.push(it, state.y());
            }
        }
        out.wall_time = start.elapsed().as_secs_f64();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::FnDensity;
    use crate::rng::{ReplayUniforms, RngState};

    #[test]
    fn slice_level_examples() {
        assert_eq!(slice_level_map(0.0f64, 1.0), 0.0);
        let u = (-2.0f64).exp();
        assert!((slice_level_map(-5.0f64, u) + 7.0).abs() < 1e-12);
        let mut rng = RngState::new(1);
        assert!(matches!(
            sample_slice_level(&mut rng, f64::NEG_INFINITY),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn latent_location_examples() {
        assert_eq!(latent_location_map(0.0, 2.0, 0.5), 0.0);
        assert_eq!(latent_location_map(10.0, 4.0, 0.0), 8.0);
        let mut rng = RngState::new(1);
        assert!(sample_latent_location(&mut rng, 0.0f64, 0.0).is_err());
    }

    #[test]
    fn latent_location_moments() {
        let mut rng = RngState::new(7);
        let n = 10_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let l = sample_latent_location(&mut rng, 0.0f64, 1.0).unwrap();
            assert!(l.abs() < 0.5);
            sum += l;
        }
        // sd of U(-1/2, 1/2) is 1/sqrt(12); 3 sd / sqrt(n) = 0.0087
        assert!((sum / n as f64).abs() < 0.009);
    }

    #[test]
    fn scale_conditional_examples() {
        let mut src = ReplayUniforms::new([1.0 - (-1.0f64).exp()]);
        let s = sample_scale_conditional(&mut src, 3.0f64, 1.0, 0.01).unwrap();
        assert!((s - 104.0).abs() < 1e-9, "{s}");
        let mut src = ReplayUniforms::new([0.25]);
        let s = sample_scale_conditional(&mut src, 0.0f64, 0.0, 1.0).unwrap();
        assert!((s - shifted_exponential_map(1.0, 0.0, 0.25)).abs() < 1e-15);
        let mut rng = RngState::new(3);
        assert!(sample_scale_conditional(&mut rng, 0.0f64, 0.0, 0.0).is_err());
    }

    #[test]
    fn scale_always_covers_current_point() {
        let mut rng = RngState::new(99);
        for _ in 0..100_000 {
            let l = crate::rng::uniform(&mut rng, -50.0, 50.0).unwrap();
            let y = crate::rng::uniform(&mut rng, -50.0, 50.0).unwrap();
            let s = sample_scale_conditional(&mut rng, l, y, 0.3).unwrap();
            assert!(s > 2.0 * (l - y).abs());
        }
    }

    #[test]
    fn flat_target_stays_in_support() {
        let target = FnDensity::new(1, |y: &[f64]| {
            if y[0] > 0.0 && y[0] < 1.0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        });
        let sampler = LatentSliceSampler::new(LatentSliceConfig::with_lambda(1.0)).unwrap();
        let mut rng = RngState::new(5);
        let out = sampler
            .run_chain(&target, vec![0.5], 2_000, 0, 1, &mut rng)
            .unwrap();
        assert!(out.rows().all(|r| r[0] > 0.0 && r[0] < 1.0));
        assert!(out.shrink_counts.iter().all(|&c| c >= 1));
    }

    #[test]
    fn state_rejects_points_outside_support() {
        let target = FnDensity::new(1, |_: &[f64]| f64::NEG_INFINITY);
        assert!(LatentState::new(&target, vec![0.0], 1.0).is_err());
        let target = FnDensity::new(2, |_: &[f64]| 0.0);
        assert!(matches!(
            LatentState::new(&target, vec![0.0], 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(LatentSliceSampler::new(LatentSliceConfig::with_lambda(0.0f64)).is_err());
        let cfg = LatentSliceConfig {
            max_shrink_iters: 0,
            ..LatentSliceConfig::<f64>::default()
        };
        assert!(cfg.validate().is_err());
        assert_eq!(LatentSliceConfig::with_gamma_scale(100.0f64).lambda, 0.01);
    }

    #[test]
    fn runs_in_single_precision() {
        let target = FnDensity::new(3, |y: &[f32]| -0.5 * y.iter().map(|v| v * v).sum::<f32>());
        let sampler = LatentSliceSampler::new(LatentSliceConfig::<f32>::default()).unwrap();
        let mut rng = RngState::new(8);
        let out = sampler
            .run_chain(&target, vec![0.0; 3], 500, 100, 2, &mut rng)
            .unwrap();
        assert_eq!(out.n_kept(), 200);
        assert!(out.rows().all(|r| r.iter().all(|v| v.is_finite())));
    }
}
