//! Dirichlet process mixture of normals in stick-breaking form. Allocations
//! move with the window kernel, so the infinite mixture never needs
//! truncating: only the components a window can reach are instantiated.

use std::time::Instant;

use crate::discrete::{discrete_step, FnTarget};
use crate::error::{Error, Result};
use crate::models::log_normal_pdf;
use crate::rng::{beta, gamma, normal, RngState, UniformSource};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdpHyper {
    /// Shape and rate of the Gamma prior on component precisions.
    pub tau: f64,
    /// Prior precision of component means, `mu_j ~ N(0, 1/s)`.
    pub s: f64,
    /// Concentration; sticks are Beta(1, alpha).
    pub alpha: f64,
}

impl Default for MdpHyper {
    fn default() -> Self {
        MdpHyper {
            tau: 0.5,
            s: 1.0,
            alpha: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdpConfig {
    pub hyper: MdpHyper,
    /// Allocation window width.
    pub k: usize,
    pub n_iter: usize,
    /// First iteration (1-based) at which a predictive draw is taken.
    pub predictive_from: usize,
}

impl Default for MdpConfig {
    fn default() -> Self {
        MdpConfig {
            hyper: MdpHyper::default(),
            k: 5,
            n_iter: 20_000,
            predictive_from: 15_001,
        }
    }
}

/// Mean and variance of `mu_j` given its `n` members with sum `sum`.
pub fn normal_mean_conditional(n: usize, sum: f64, prec: f64, prior_prec: f64) -> (f64, f64) {
    let post_prec = prior_prec + n as f64 * prec;
    (prec * sum / post_prec, 1.0 / post_prec)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StickBreakingState {
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub mu: Vec<f64>,
    pub prec: Vec<f64>,
    /// 0-based component of each observation.
    pub d: Vec<usize>,
}

impl StickBreakingState {
    pub fn instantiated_count(&self) -> usize {
        self.v.len()
    }

    pub fn max_allocation(&self) -> usize {
        self.d.iter().copied().max().unwrap_or(0)
    }

    /// Components holding at least one observation.
    pub fn occupied(&self) -> usize {
        let mut seen = vec![false; self.instantiated_count()];
        self.d.iter().for_each(|&j| seen[j] = true);
        seen.into_iter().filter(|&b| b).count()
    }

    fn residual_mass(&self) -> f64 {
        self.v.iter().map(|v| 1.0 - v).product()
    }

    fn push_prior_component(&mut self, hyper: &MdpHyper, rng: &mut RngState) -> Result<()> {
        let v = beta(rng, 1.0, hyper.alpha)?;
        let w = v * self.residual_mass();
        self.v.push(v);
        self.w.push(w);
        self.mu.push(normal(rng, 0.0, (1.0 / hyper.s).sqrt())?);
        self.prec.push(gamma(rng, hyper.tau, 1.0 / hyper.tau)?);
        Ok(())
    }

    fn ensure_instantiated(
        &mut self,
        count: usize,
        hyper: &MdpHyper,
        rng: &mut RngState,
    ) -> Result<()> {
        while self.instantiated_count() < count {
            self.push_prior_component(hyper, rng)?;
        }
        Ok(())
    }

    fn recompute_weights(&mut self) {
        let mut rest = 1.0;
        for (w, &v) in self.w.iter_mut().zip(&self.v) {
            *w = v * rest;
            rest *= 1.0 - v;
        }
    }
}

pub struct Mdp<'a> {
    pub data: &'a [f64],
    pub config: MdpConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdpOutput {
    pub predictive: Vec<f64>,
    pub occupied: Vec<usize>,
    pub instantiated: Vec<usize>,
    pub wall_time: f64,
}

impl<'a> Mdp<'a> {
    pub fn new(data: &'a [f64], config: MdpConfig) -> Result<Self> {
        if config.k == 0 {
            return Err(Error::param("k", 0.0));
        }
        let h = config.hyper;
        for (name, v) in [("tau", h.tau), ("s", h.s), ("alpha", h.alpha)] {
            if !(v > 0.0) {
                return Err(Error::param(name, v));
            }
        }
        Ok(Mdp { data, config })
    }

    /// Everyone in the first component, `k` components drawn from the prior.
    pub fn initial_state(&self, rng: &mut RngState) -> Result<StickBreakingState> {
        let mut state = StickBreakingState {
            v: Vec::new(),
            w: Vec::new(),
            mu: Vec::new(),
            prec: Vec::new(),
            d: vec![0; self.data.len()],
        };
        state.ensure_instantiated(self.config.k, &self.config.hyper, rng)?;
        Ok(state)
    }

    /// One sweep: component parameters, sticks, then every allocation.
    pub fn iterate(&self, state: &mut StickBreakingState, rng: &mut RngState) -> Result<()> {
        let hyper = &self.config.hyper;
        let k = self.config.k;

        // Components past max(d) + k carry no data; their conditionals are the
        // prior, so dropping them and re-drawing on demand is exact.
        let keep = state.max_allocation() + k;
        state.v.truncate(keep);
        state.w.truncate(keep);
        state.mu.truncate(keep);
        state.prec.truncate(keep);
        state.ensure_instantiated(keep, hyper, rng)?;

        let m = state.instantiated_count();
        let mut counts = vec![0usize; m];
        let mut sums = vec![0.0; m];
        for (&j, &x) in state.d.iter().zip(self.data) {
            counts[j] += 1;
            sums[j] += x;
        }
        let mut sq = vec![0.0; m];
        for (&j, &x) in state.d.iter().zip(self.data) {
            sq[j] += (x - state.mu[j]).powi(2);
        }
        let mut tail = counts.iter().sum::<usize>();
        for j in 0..m {
            let shape = hyper.tau + 0.5 * counts[j] as f64;
            let rate = hyper.tau + 0.5 * sq[j];
            state.prec[j] = gamma(rng, shape, 1.0 / rate)?;
            let (mean, var) = normal_mean_conditional(counts[j], sums[j], state.prec[j], hyper.s);
            state.mu[j] = normal(rng, mean, var.sqrt())?;
            tail -= counts[j];
            state.v[j] = beta(rng, 1.0 + counts[j] as f64, hyper.alpha + tail as f64)?;
        }
        state.recompute_weights();

        for i in 0..self.data.len() {
            state.ensure_instantiated(state.d[i] + k, hyper, rng)?;
            let x = self.data[i];
            let (w, mu, prec) = (&state.w, &state.mu, &state.prec);
            let target = FnTarget::new(0, |j: usize| {
                w[j].ln() + log_normal_pdf(x, mu[j], 1.0 / prec[j])
            });
            state.d[i] = discrete_step(state.d[i], &target, k, rng)?;
        }
        let reach = state.max_allocation() + k;
        state.ensure_instantiated(reach, hyper, rng)?;
        Ok(())
    }

    /// Draw from the current predictive: pick a component by weight,
    /// instantiating further sticks while the unassigned mass exceeds 1e-10.
    pub fn predictive_draw(
        &self,
        state: &mut StickBreakingState,
        rng: &mut RngState,
    ) -> Result<f64> {
        let u = rng.next_unit();
        let mut acc = 0.0;
        let mut j = 0;
        loop {
            if j == state.instantiated_count() {
                if state.residual_mass() < 1e-10 {
                    j -= 1;
                    break;
                }
                state.push_prior_component(&self.config.hyper, rng)?;
            }
            acc += state.w[j];
            if u < acc {
                break;
            }
            j += 1;
        }
        normal(rng, state.mu[j], (1.0 / state.prec[j]).sqrt())
    }

    pub fn run(&self, rng: &mut RngState) -> Result<MdpOutput> {
        let start = Instant::now();
        let mut state = self.initial_state(rng)?;
        let n_pred = self
            .config
            .n_iter
            .saturating_sub(self.config.predictive_from)
            + 1;
        let mut out = MdpOutput {
            predictive: Vec::with_capacity(n_pred),
            occupied: Vec::with_capacity(self.config.n_iter),
            instantiated: Vec::with_capacity(self.config.n_iter),
            wall_time: 0.0,
        };
        for it in 1..=self.config.n_iter {
            self.iterate(&mut state, rng)?;
            out.occupied.push(state.occupied());
            out.instantiated.push(state.instantiated_count());
            if it >= self.config.predictive_from {
                out.predictive.push(self.predictive_draw(&mut state, rng)?);
            }
        }
        out.wall_time = start.elapsed().as_secs_f64();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_mean_at_zero_data_is_zero() {
        let (mean, var) = normal_mean_conditional(50, 0.0, 2.0, 1.0);
        assert_eq!(mean, 0.0);
        assert!((var - 1.0 / 101.0).abs() < 1e-15);
        let (mean, _) = normal_mean_conditional(4, 8.0, 1.0, 1.0);
        assert!((mean - 8.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn width_one_freezes_allocations() {
        let data: Vec<f64> = (0..30).map(|i| i as f64 / 3.0).collect();
        let cfg = MdpConfig {
            k: 1,
            n_iter: 20,
            predictive_from: 1,
            ..MdpConfig::default()
        };
        let mdp = Mdp::new(&data, cfg).unwrap();
        let mut rng = RngState::new(1);
        let mut state = mdp.initial_state(&mut rng).unwrap();
        for _ in 0..20 {
            mdp.iterate(&mut state, &mut rng).unwrap();
            assert!(state.d.iter().all(|&j| j == 0));
        }
    }

    #[test]
    fn sticks_stay_valid_and_reachable() {
        let mut rng = RngState::new(2);
        let data = crate::models::UnivariateSample::three_normal_mixture(&mut rng, 120)
            .unwrap()
            .x;
        let cfg = MdpConfig {
            k: 3,
            ..MdpConfig::default()
        };
        let mdp = Mdp::new(&data, cfg).unwrap();
        let mut state = mdp.initial_state(&mut rng).unwrap();
        for _ in 0..200 {
            mdp.iterate(&mut state, &mut rng).unwrap();
            assert!(state.instantiated_count() >= state.max_allocation() + cfg.k);
            assert!(state.w.iter().all(|&w| w > 0.0 && w < 1.0));
            assert!(state.w.iter().sum::<f64>() < 1.0);
            let x = mdp.predictive_draw(&mut state, &mut rng).unwrap();
            assert!(x.is_finite());
        }
    }

    #[test]
    fn single_component_predictive() {
        // One stick with v = 1 holds all mass: predictive is N(mu, 1/prec).
        let mdp = Mdp::new(&[], MdpConfig::default()).unwrap();
        let mut state = StickBreakingState {
            v: vec![1.0],
            w: vec![1.0],
            mu: vec![3.0],
            prec: vec![4.0],
            d: vec![],
        };
        let mut rng = RngState::new(4);
        let draws: Vec<f64> = (0..20_000)
            .map(|_| mdp.predictive_draw(&mut state, &mut rng).unwrap())
            .collect();
        assert_eq!(state.instantiated_count(), 1);
        let m = crate::diagnostics::mean(&draws);
        let s = crate::diagnostics::sd(&draws);
        assert!((m - 3.0).abs() < 0.02 && (s - 0.5).abs() < 0.02, "{m} {s}");
    }
}
