use std::time::Instant;

use crate::chain::{ChainOutput, RunLength};
use crate::density::LogDensity;
use crate::error::{Error, Result};
use crate::rng::UniformSource;
use crate::scalar::{Field, Scalar};

use super::shrink_1d;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteppingOutConfig<T> {
    /// Initial interval width `k`.
    pub width: T,
    /// Expansion budget `m`: at most `m - 1` extensions in total.
    pub max_steps: usize,
    pub max_shrink_iters: usize,
}

impl<T: Scalar> SteppingOutConfig<T> {
    pub fn new(width: T, max_steps: usize) -> Result<Self> {
        let cfg = SteppingOutConfig {
            width,
            max_steps,
            max_shrink_iters: 10_000,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > T::zero()) || !self.width.is_finite() {
            return Err(Error::param("width", self.width.as_f64()));
        }
        if self.max_steps == 0 {
            return Err(Error::param("max_steps", 0.0));
        }
        if self.max_shrink_iters == 0 {
            return Err(Error::param("max_shrink_iters", 0.0));
        }
        Ok(())
    }
}

/// Randomly positioned bracket `(x - k(1 - u), x + k u)`.
pub fn initial_bracket<T: Field>(x: T, k: T, u: T) -> (T, T) {
    let left = x.clone() - k.clone() * (T::one() - u.clone());
    let right = x + k * u;
    (left, right)
}

/// Stepping-out interval around `x` for the slice `{t : log_f(t) > log_w}`.
///
/// The budget `m` is split at random into `J` left and `K = m - 1 - J` right
/// extensions; each side grows by `k` until its end leaves the slice or its
/// budget runs out.
pub fn stepping_out<T, U, F>(
    x: T,
    log_w: T,
    mut log_f: F,
    cfg: &SteppingOutConfig<T>,
    src: &mut U,
) -> (T, T)
where
    T: Scalar,
    U: UniformSource + ?Sized,
    F: FnMut(T) -> T,
{
    let k = cfg.width;
    let (mut left, mut right) = initial_bracket(x, k, T::of(src.next_unit()));
    let m = cfg.max_steps;
    let mut j = ((src.next_unit() * m as f64) as usize).min(m - 1);
    let mut budget_right = m - 1 - j;
    while j > 0 && log_f(left) > log_w {
        left = left - k;
        j -= 1;
    }
    while budget_right > 0 && log_f(right) > log_w {
        right = right + k;
        budget_right -= 1;
    }
    (left, right)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceStep1d<T> {
    pub x: T,
    pub log_level: T,
    pub interval: (T, T),
    pub proposals: usize,
}

/// One univariate slice update: level, stepping out, then shrinkage.
pub fn slice_step_1d<T, U, F>(
    x: T,
    mut log_f: F,
    cfg: &SteppingOutConfig<T>,
    src: &mut U,
) -> Result<SliceStep1d<T>>
where
    T: Scalar,
    U: UniformSource + ?Sized,
    F: FnMut(T) -> T,
{
    let log_fx = log_f(x);
    if !log_fx.is_finite() {
        return Err(Error::InvalidState(format!(
            "slice update started at {x} with log density {log_fx}"
        )));
    }
    let log_level = log_fx + T::of(src.next_open_unit().ln());
    let interval = stepping_out(x, log_level, &mut log_f, cfg, src);
    let (x_new, proposals) = shrink_1d(
        src,
        interval.0,
        interval.1,
        x,
        |t| log_f(t) > log_level,
        cfg.max_shrink_iters,
    )?;
    Ok(SliceStep1d {
        x: x_new,
        log_level,
        interval,
        proposals,
    })
}

/// Updates every coordinate in index order from its full conditional.
/// Returns the total shrink proposals spent.
pub fn gibbs_sweep_slice<T, D, U>(
    y: &mut [T],
    target: &D,
    cfg: &SteppingOutConfig<T>,
    src: &mut U,
) -> Result<usize>
where
    T: Scalar,
    D: LogDensity<T> + ?Sized,
    U: UniformSource + ?Sized,
{
    if y.len() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            got: y.len(),
        });
    }
    let mut scratch = y.to_vec();
    let mut proposals = 0;
    for j in 0..y.len() {
        let step = slice_step_1d(
            y[j],
            |t| {
                scratch[j] = t;
                target.log_density(&scratch)
            },
            cfg,
            src,
        )?;
        y[j] = step.x;
        scratch[j] = step.x;
        proposals += step.proposals;
    }
    Ok(proposals)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteppingOutSampler<T> {
    pub config: SteppingOutConfig<T>,
}

impl<T: Scalar> SteppingOutSampler<T> {
    pub fn new(config: SteppingOutConfig<T>) -> Result<Self> {
        config.validate()?;
        Ok(SteppingOutSampler { config })
    }

    /// One Gibbs sweep per iteration; same retention rule as the latent
    /// slice chain.
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
        let mut y = init;
        if !(target.log_density(&y) > T::neg_infinity()) {
            return Err(Error::InvalidState(
                "initial point lies outside the support".into(),
            ));
        }
        let mut out = ChainOutput::with_capacity(target.dim(), run.n_kept(), n_iter);
        for it in 1..=n_iter {
            let proposals = gibbs_sweep_slice(&mut y, target, &self.config, src)?;
            out.shrink_counts.push(proposals);
            if run.keeps(it) {
                out.push(it, &y);
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
    fn single_step_budget_is_the_bare_bracket() {
        let cfg = SteppingOutConfig::new(2.0, 1).unwrap();
        let mut src = ReplayUniforms::new([0.25, 0.9]);
        let (l, r) = stepping_out(1.0, -1.0, |_| 0.0, &cfg, &mut src);
        assert_eq!((l, r), (1.0 - 2.0 * 0.75, 1.0 + 2.0 * 0.25));
    }

    #[test]
    fn flat_target_uses_the_whole_budget() {
        let mut rng = RngState::new(4);
        for m in 1..8 {
            let cfg = SteppingOutConfig::new(0.5, m).unwrap();
            for _ in 0..50 {
                let (l, r) = stepping_out(0.0, -1.0, |_| 0.0, &cfg, &mut rng);
                let width = r - l;
                assert!((width - 0.5 * m as f64).abs() < 1e-12);
                assert!(width <= 0.5 * (m + 1) as f64);
            }
        }
    }

    #[test]
    fn brackets_the_normal_slice() {
        let log_phi = |t: f64| -0.5 * t * t - 0.5 * (2.0 * std::f64::consts::PI).ln();
        let cfg = SteppingOutConfig::new(1.0, 50).unwrap();
        let mut rng = RngState::new(12);
        let mut bracketed = 0;
        for _ in 0..1_000 {
            let x = crate::rng::uniform(&mut rng, -0.5, 0.5).unwrap();
            let log_w = log_phi(x) + rng.next_open_unit().ln() * 0.1;
            let half_width = (-2.0 * (log_w + 0.5 * (2.0 * std::f64::consts::PI).ln())).sqrt();
            let (l, r) = stepping_out(x, log_w, log_phi, &cfg, &mut rng);
            assert!(l < x && x < r);
            // A side whose share of the budget is zero cannot grow.
            if l <= -half_width && r >= half_width {
                bracketed += 1;
            }
        }
        assert!(bracketed > 900, "{bracketed}");
    }

    #[test]
    fn sweep_on_one_dimension_is_a_slice_step() {
        let target = FnDensity::new(1, |y: &[f64]| -0.5 * y[0] * y[0]);
        let cfg = SteppingOutConfig::new(1.0, 10).unwrap();
        let mut a = RngState::new(77);
        let mut b = RngState::new(77);
        let mut y = vec![0.3];
        gibbs_sweep_slice(&mut y, &target, &cfg, &mut a).unwrap();
        let step = slice_step_1d(0.3, |t| -0.5 * t * t, &cfg, &mut b).unwrap();
        assert_eq!(y[0], step.x);
    }

    #[test]
    fn accepted_points_satisfy_the_slice() {
        let cfg = SteppingOutConfig::new(1.0, 10).unwrap();
        let mut rng = RngState::new(31);
        let f = |t: f64| -t.abs().powf(1.5);
        let mut x = 0.0;
        for _ in 0..5_000 {
            let s = slice_step_1d(x, f, &cfg, &mut rng).unwrap();
            assert!(f(s.x) > s.log_level);
            assert!(s.interval.0 <= s.x && s.x <= s.interval.1);
            x = s.x;
        }
    }

    #[test]
    fn rejects_start_outside_support() {
        let cfg = SteppingOutConfig::new(1.0, 3).unwrap();
        let mut rng = RngState::new(1);
        assert!(slice_step_1d(0.0, |_| f64::NEG_INFINITY, &cfg, &mut rng).is_err());
        assert!(SteppingOutConfig::new(0.0, 1).is_err());
        assert!(SteppingOutConfig::new(1.0, 0).is_err());
    }
}
