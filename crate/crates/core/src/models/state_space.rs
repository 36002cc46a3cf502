use crate::density::LogDensity;
use crate::error::Result;
use crate::rng::{poisson, standard_normal, RngState};

use super::CountSeries;

/// Latent AR(1) states with Poisson counts:
/// `x_i = rho x_{i-1} + sigma z_i`, `x_0 = 0`, `y_i | x_i ~ Poisson(theta e^{x_i})`.
///
/// As a [`LogDensity`] it is the conditional of the state vector given
/// `theta`:
/// `sum_i [x_i y_i - theta e^{x_i} - (x_i - rho x_{i-1})^2 / (2 sigma^2)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    pub y: Vec<u64>,
    pub rho: f64,
    pub sigma: f64,
    pub theta: f64,
}

impl StateSpace {
    pub fn new(y: Vec<u64>) -> Self {
        StateSpace {
            y,
            rho: 0.8,
            sigma: 1.0,
            theta: 1.0,
        }
    }

    pub fn generate_data(
        rng: &mut RngState,
        n: usize,
        rho: f64,
        sigma: f64,
        theta: f64,
    ) -> Result<CountSeries> {
        let mut x_true = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        let mut prev = 0.0;
        for _ in 0..n {
            let x = rho * prev + sigma * standard_normal(rng);
            y.push(poisson(rng, theta * x.exp())?);
            x_true.push(x);
            prev = x;
        }
        Ok(CountSeries { x_true, y })
    }

    pub fn total_count(&self) -> f64 {
        self.y.iter().sum::<u64>() as f64
    }
}

impl LogDensity<f64> for StateSpace {
    fn dim(&self) -> usize {
        self.y.len()
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        let inv_2s2 = 0.5 / (self.sigma * self.sigma);
        let mut prev = 0.0;
        let mut lp = 0.0;
        for (&xi, &yi) in x.iter().zip(&self.y) {
            let d = xi - self.rho * prev;
            lp += xi * yi as f64 - self.theta * xi.exp() - d * d * inv_2s2;
            prev = xi;
        }
        if lp.is_nan() {
            f64::NEG_INFINITY
        } else {
            lp
        }
    }
}
