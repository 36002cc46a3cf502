//! Mixture of exponentials `sum_j w_j Exp(rate j)` with an unknown number of
//! components `M`. The component count moves with the window kernel over a
//! frozen chain of candidate weight vectors built by split and combine moves.

use std::time::Instant;

use statrs::function::gamma::ln_gamma;

use crate::discrete::{discrete_step, FnTarget};
use crate::error::{Error, Result};
use crate::rng::{categorical, dirichlet, RngState, UniformSource};
use crate::scalar::log_sum_exp;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteMixtureConfig {
    /// Rate of the shifted Poisson prior, `M - 1 ~ Poisson(poisson_rate)`.
    pub poisson_rate: f64,
    /// Symmetric Dirichlet concentration for the weights.
    pub alpha: f64,
    pub k: usize,
    /// Include the split/combine Jacobian in the candidate log-masses.
    pub jacobian: bool,
    pub n_iter: usize,
    pub burn_in: usize,
}

impl Default for FiniteMixtureConfig {
    fn default() -> Self {
        FiniteMixtureConfig {
            poisson_rate: 1.0,
            alpha: 1.0,
            k: 3,
            jacobian: true,
            n_iter: 20_000,
            burn_in: 5_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMixtureState {
    /// Weights of components `1..=M`; `w.len() == M`.
    pub w: Vec<f64>,
    /// Component of each observation, in `1..=M`.
    pub d: Vec<usize>,
}

impl FiniteMixtureState {
    pub fn m(&self) -> usize {
        self.w.len()
    }
}

/// Candidate weight vectors for every `z` in the window around the current
/// component count, with their unnormalized log-masses.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureCandidates {
    pub floor: usize,
    pub weights: Vec<Vec<f64>>,
    pub log_mass: Vec<f64>,
}

impl MixtureCandidates {
    pub fn build<U: UniformSource + ?Sized>(
        w: &[f64],
        data: &[f64],
        cfg: &FiniteMixtureConfig,
        src: &mut U,
    ) -> Result<Self> {
        let m = w.len();
        let k = cfg.k;
        let floor = m.saturating_sub(k - 1).max(1);
        let top = m + k - 1;
        let mut weights = vec![Vec::new(); top - floor + 1];
        let mut log_jac = vec![0.0; top - floor + 1];
        weights[m - floor] = w.to_vec();

        for z in m + 1..=top {
            let mut cur = weights[z - 1 - floor].clone();
            let i = pick_index(src, cur.len());
            let u = src.next_open_unit();
            let old = cur[i];
            cur[i] = u * old;
            cur.push((1.0 - u) * old);
            log_jac[z - floor] = log_jac[z - 1 - floor] + old.ln();
            weights[z - floor] = cur;
        }
        for z in (floor..m).rev() {
            let mut cur = weights[z + 1 - floor].clone();
            let last = cur.pop().expect("z + 1 >= 2 components");
            let l = pick_index(src, cur.len());
            cur[l] += last;
            log_jac[z - floor] = log_jac[z + 1 - floor] - cur[l].ln();
            weights[z - floor] = cur;
        }

        let log_mass = weights
            .iter()
            .zip(&log_jac)
            .map(|(wz, &lj)| {
                let z = wz.len();
                let mut lp = log_shifted_poisson(z, cfg.poisson_rate)
                    + log_dirichlet(wz, cfg.alpha)
                    + log_likelihood(wz, data);
                if cfg.jacobian {
                    lp += lj;
                }
                lp
            })
            .collect();
        Ok(MixtureCandidates {
            floor,
            weights,
            log_mass,
        })
    }

    pub fn log_mass_at(&self, z: usize) -> f64 {
        if z < self.floor {
            return f64::NEG_INFINITY;
        }
        self.log_mass
            .get(z - self.floor)
            .copied()
            .unwrap_or(f64::NEG_INFINITY)
    }
}

fn pick_index<U: UniformSource + ?Sized>(src: &mut U, n: usize) -> usize {
    ((src.next_unit() * n as f64) as usize).min(n - 1)
}

fn log_shifted_poisson(z: usize, rate: f64) -> f64 {
    let n = (z - 1) as f64;
    n * rate.ln() - rate - ln_gamma(n + 1.0)
}

fn log_dirichlet(w: &[f64], alpha: f64) -> f64 {
    let z = w.len() as f64;
    ln_gamma(z * alpha) - z * ln_gamma(alpha)
        + (alpha - 1.0) * w.iter().map(|v| v.ln()).sum::<f64>()
}

fn log_likelihood(w: &[f64], data: &[f64]) -> f64 {
    data.iter()
        .map(|&x| {
            log_sum_exp(w.iter().enumerate().map(|(j, &wj)| {
                let rate = (j + 1) as f64;
                wj.ln() + rate.ln() - rate * x
            }))
        })
        .sum()
}

/// Mixture density `sum_j w_j j exp(-j x)`.
pub fn mixture_density(w: &[f64], x: f64) -> f64 {
    w.iter()
        .enumerate()
        .map(|(j, &wj)| {
            let rate = (j + 1) as f64;
            wj * rate * (-rate * x).exp()
        })
        .sum()
}

pub struct FiniteMixture<'a> {
    pub data: &'a [f64],
    pub config: FiniteMixtureConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMixtureOutput {
    /// Component count after every iteration.
    pub m_trace: Vec<usize>,
    /// Average of the mixture density over retained iterations, on `grid`.
    pub grid: Vec<f64>,
    pub predictive_density: Vec<f64>,
    /// Mean weight of each rate over retained iterations (zero where absent).
    pub mean_weights: Vec<f64>,
    pub wall_time: f64,
}

impl<'a> FiniteMixture<'a> {
    pub fn new(data: &'a [f64], config: FiniteMixtureConfig) -> Result<Self> {
        if config.k == 0 {
            return Err(Error::param("k", 0.0));
        }
        if !(config.poisson_rate > 0.0) {
            return Err(Error::param("poisson_rate", config.poisson_rate));
        }
        if !(config.alpha > 0.0) {
            return Err(Error::param("alpha", config.alpha));
        }
        if let Some(&x) = data.iter().find(|x| !(**x >= 0.0)) {
            return Err(Error::param("data", x));
        }
        Ok(FiniteMixture { data, config })
    }

    pub fn initial_state(&self) -> FiniteMixtureState {
        FiniteMixtureState {
            w: vec![1.0],
            d: vec![1; self.data.len()],
        }
    }

    /// Weights given allocations, then `M`, then allocations given weights.
    pub fn iterate(&self, state: &mut FiniteMixtureState, rng: &mut RngState) -> Result<()> {
        let cfg = &self.config;
        let mut conc = vec![cfg.alpha; state.m()];
        for &j in &state.d {
            conc[j - 1] += 1.0;
        }
        state.w = dirichlet(rng, &conc)?;

        let cand = MixtureCandidates::build(&state.w, self.data, cfg, rng)?;
        let target = FnTarget::new(1, |z: usize| cand.log_mass_at(z));
        let m = discrete_step(state.m(), &target, cfg.k, rng)?;
        state.w = cand.weights[m - cand.floor].clone();

        let mut probs = vec![0.0; m];
        for (d, &x) in state.d.iter_mut().zip(self.data) {
            for (j, p) in probs.iter_mut().enumerate() {
                let rate = (j + 1) as f64;
                *p = state.w[j] * rate * (-rate * x).exp();
            }
            *d = categorical(rng, &probs)? + 1;
        }
        Ok(())
    }

    pub fn run(&self, grid: Vec<f64>, rng: &mut RngState) -> Result<FiniteMixtureOutput> {
        let start = Instant::now();
        let mut state = self.initial_state();
        let mut out = FiniteMixtureOutput {
            m_trace: Vec::with_capacity(self.config.n_iter),
            predictive_density: vec![0.0; grid.len()],
            grid,
            mean_weights: Vec::new(),
            wall_time: 0.0,
        };
        let mut kept = 0usize;
        for it in 1..=self.config.n_iter {
            self.iterate(&mut state, rng)?;
            out.m_trace.push(state.m());
            if it > self.config.burn_in {
                kept += 1;
                for (acc, &x) in out.predictive_density.iter_mut().zip(&out.grid) {
                    *acc += mixture_density(&state.w, x);
                }
                if out.mean_weights.len() < state.m() {
                    out.mean_weights.resize(state.m(), 0.0);
                }
                for (acc, &w) in out.mean_weights.iter_mut().zip(&state.w) {
                    *acc += w;
                }
            }
        }
        if kept > 0 {
            let n = kept as f64;
            out.predictive_density.iter_mut().for_each(|v| *v /= n);
            out.mean_weights.iter_mut().for_each(|v| *v /= n);
        }
        out.wall_time = start.elapsed().as_secs_f64();
        Ok(out)
    }
}
