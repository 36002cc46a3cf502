//! Seeded randomness and the elementary samplers every kernel draws from.
//!
//! Streams: `RngState::with_stream(seed, c)` is a ChaCha8 generator keyed by
//! `seed` on stream `c`. Chains fanned out from one seed use stream
//! `0, 1, 2, ...`; distinct streams of one key never overlap.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

use crate::error::{Error, Result};

/// Anything that hands out uniforms on `[0, 1)`.
///
/// The slice kernels only need uniforms, so they take this trait instead of a
/// full generator; [`ReplayUniforms`] feeds scripted values for hand traces.
pub trait UniformSource {
    fn next_unit(&mut self) -> f64;

    /// Uniform on the open interval `(0, 1)`.
    fn next_open_unit(&mut self) -> f64 {
        loop {
            let u = self.next_unit();
            if u > 0.0 {
                return u;
            }
        }
    }
}

impl<U: UniformSource + ?Sized> UniformSource for &mut U {
    fn next_unit(&mut self) -> f64 {
        (**self).next_unit()
    }
}

#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        RngState {
            seed,
            stream,
            inner,
        }
    }

    /// Fresh generator on another stream of the same key.
    pub fn split(&self, stream: u64) -> Self {
        Self::with_stream(self.seed, stream)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

impl UniformSource for RngState {
    fn next_unit(&mut self) -> f64 {
        self.inner.random::<f64>()
    }
}

/// Replays a fixed list of uniforms. Panics once the list is exhausted.
#[derive(Debug, Clone)]
pub struct ReplayUniforms {
    values: Vec<f64>,
    pos: usize,
}

impl ReplayUniforms {
    pub fn new(values: impl Into<Vec<f64>>) -> Self {
        ReplayUniforms {
            values: values.into(),
            pos: 0,
        }
    }

    pub fn consumed(&self) -> usize {
        self.pos
    }
}

impl UniformSource for ReplayUniforms {
    fn next_unit(&mut self) -> f64 {
        let u = *self
            .values
            .get(self.pos)
            .unwrap_or_else(|| panic!("replay exhausted after {} uniforms", self.pos));
        self.pos += 1;
        u
    }

    // Scripted values are used verbatim, including 0.
    fn next_open_unit(&mut self) -> f64 {
        self.next_unit()
    }
}

/// `lo + (hi - lo) u`.
pub fn uniform_map(lo: f64, hi: f64, u: f64) -> f64 {
    lo + (hi - lo) * u
}

pub fn uniform<U: UniformSource + ?Sized>(src: &mut U, lo: f64, hi: f64) -> Result<f64> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInterval { lo, hi });
    }
    Ok(uniform_map(lo, hi, src.next_unit()))
}

/// Inverse CDF of `shift + Exponential(rate)` at `u`.
pub fn shifted_exponential_map(rate: f64, shift: f64, u: f64) -> f64 {
    shift - (-u).ln_1p() / rate
}

pub fn shifted_exponential<U: UniformSource + ?Sized>(
    src: &mut U,
    rate: f64,
    shift: f64,
) -> Result<f64> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::param("rate", rate));
    }
    if !(shift >= 0.0) {
        return Err(Error::param("shift", shift));
    }
    Ok(shifted_exponential_map(rate, shift, src.next_open_unit()))
}

/// Standard normal by the Marsaglia polar method; the second variate of each
/// accepted pair is discarded so every draw consumes whole pairs.
pub fn standard_normal<U: UniformSource + ?Sized>(src: &mut U) -> f64 {
    loop {
        let a = 2.0 * src.next_unit() - 1.0;
        let b = 2.0 * src.next_unit() - 1.0;
        let s = a * a + b * b;
        if s > 0.0 && s < 1.0 {
            return a * (-2.0 * s.ln() / s).sqrt();
        }
    }
}

pub fn normal<U: UniformSource + ?Sized>(src: &mut U, mean: f64, sd: f64) -> Result<f64> {
    if !(sd > 0.0) || !sd.is_finite() {
        return Err(Error::param("sd", sd));
    }
    Ok(mean + sd * standard_normal(src))
}

/// Gamma with the given shape and scale (mean `shape * scale`).
pub fn gamma(rng: &mut RngState, shape: f64, scale: f64) -> Result<f64> {
    if !(shape > 0.0) || !shape.is_finite() {
        return Err(Error::param("shape", shape));
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::param("scale", scale));
    }
    let dist = rand_distr::Gamma::new(shape, scale).map_err(|_| Error::param("shape", shape))?;
    Ok(dist.sample(rng))
}

pub fn beta(rng: &mut RngState, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::param("a", a));
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::param("b", b));
    }
    let dist = rand_distr::Beta::new(a, b).map_err(|_| Error::param("a", a))?;
    Ok(dist.sample(rng))
}

/// Dirichlet through normalized unit-scale gammas.
pub fn dirichlet(rng: &mut RngState, alphas: &[f64]) -> Result<Vec<f64>> {
    if alphas.is_empty() {
        return Err(Error::param("alphas.len", 0.0));
    }
    let mut draws = alphas
        .iter()
        .map(|&a| {
            if !(a > 0.0) {
                return Err(Error::param("alpha", a));
            }
            gamma(rng, a, 1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = draws.iter().sum();
    if !(total > 0.0) {
        // Every gamma underflowed (all alphas tiny); fall back to a vertex.
        let j = categorical(rng, alphas)?;
        draws.iter_mut().for_each(|d| *d = 0.0);
        draws[j] = 1.0;
        return Ok(draws);
    }
    draws.iter_mut().for_each(|d| *d /= total);
    Ok(draws)
}

/// Index `i` with probability `weights[i] / sum(weights)`.
pub fn categorical<U: UniformSource + ?Sized>(src: &mut U, weights: &[f64]) -> Result<usize> {
    if let Some(&bad) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
        return Err(Error::param("weight", bad));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::param("weights.sum", total));
    }
    Ok(pick(weights.iter().copied(), total, src.next_unit()))
}

/// Categorical draw from unnormalized log-weights. `None` when every weight is
/// `-inf`.
pub fn categorical_log<U: UniformSource + ?Sized>(
    src: &mut U,
    log_weights: &[f64],
) -> Option<usize> {
    let max = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return None;
    }
    let total: f64 = log_weights.iter().map(|lw| (lw - max).exp()).sum();
    Some(pick(
        log_weights.iter().map(|lw| (lw - max).exp()),
        total,
        src.next_unit(),
    ))
}

fn pick(weights: impl Iterator<Item = f64>, total: f64, u: f64) -> usize {
    let target = u * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            last_positive = i;
            acc += w;
            if target < acc {
                return i;
            }
        }
    }
    // Rounding left `target` just past the final partial sum.
    last_positive
}

pub fn poisson(rng: &mut RngState, mean: f64) -> Result<u64> {
    if !(mean > 0.0) || !mean.is_finite() {
        return Err(Error::param("mean", mean));
    }
    let dist = rand_distr::Poisson::new(mean).map_err(|_| Error::param("mean", mean))?;
    let draw: f64 = dist.sample(rng);
    Ok(draw as u64)
}
