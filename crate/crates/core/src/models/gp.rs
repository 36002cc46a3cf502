use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::baseline::LowerTriangular;
use crate::density::LogDensity;
use crate::diagnostics::linspace;
use crate::error::{Error, Result};
use crate::rng::{standard_normal, RngState};

use super::RegressionData;

/// Gaussian-process regression with a squared-exponential kernel and known
/// Gaussian noise.
#[derive(Debug, Clone, PartialEq)]
pub struct GpRegression {
    pub data: RegressionData,
    pub noise_sd: f64,
    pub lengthscale: f64,
    pub signal_sd: f64,
    /// Added to the kernel diagonal as `jitter * signal_sd^2`.
    pub jitter: f64,
}

impl GpRegression {
    pub const N: usize = 100;

    pub fn new(data: RegressionData) -> Self {
        GpRegression {
            data,
            noise_sd: 0.2,
            lengthscale: 0.1,
            signal_sd: 1.0,
            jitter: 1e-8,
        }
    }

    pub fn truth(x: f64) -> f64 {
        (4.0 * PI * x).sin() + (7.0 * PI * x).sin()
    }

    /// `n` evenly spaced inputs on `[0, 1]`, noisy observations of the truth.
    pub fn generate_data(rng: &mut RngState, n: usize, noise_sd: f64) -> RegressionData {
        let x = linspace(0.0, 1.0, n);
        let y = x
            .iter()
            .map(|&xi| Self::truth(xi) + noise_sd * standard_normal(rng))
            .collect();
        RegressionData { x, y }
    }

    pub fn dim(&self) -> usize {
        self.data.x.len()
    }

    pub fn kernel_matrix(&self) -> DMatrix<f64> {
        let x = &self.data.x;
        let tau2 = self.signal_sd * self.signal_sd;
        let psi2 = self.lengthscale * self.lengthscale;
        DMatrix::from_fn(x.len(), x.len(), |i, j| {
            let d = x[i] - x[j];
            let k = tau2 * (-d * d / (2.0 * psi2)).exp();
            if i == j {
                k + self.jitter * tau2
            } else {
                k
            }
        })
    }

    pub fn cholesky(&self) -> Result<LowerTriangular<f64>> {
        let n = self.dim();
        let chol = self
            .kernel_matrix()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite)?;
        let l = chol.l();
        let data = (0..n * n).map(|k| l[(k / n, k % n)]).collect();
        LowerTriangular::from_row_major(n, data)
    }

    /// `-1/2 sum (y_i - f_i)^2 / sigma^2`, up to a constant.
    pub fn log_likelihood(&self, f: &[f64]) -> f64 {
        let s2 = self.noise_sd * self.noise_sd;
        -0.5 * self
            .data
            .y
            .iter()
            .zip(f)
            .map(|(y, fi)| (y - fi) * (y - fi))
            .sum::<f64>()
            / s2
    }

    /// Root mean square distance of `f` to the true function at the inputs.
    pub fn rmse_to_truth(&self, f: &[f64]) -> f64 {
        let n = f.len() as f64;
        (self
            .data
            .x
            .iter()
            .zip(f)
            .map(|(&x, fi)| (fi - Self::truth(x)).powi(2))
            .sum::<f64>()
            / n)
            .sqrt()
    }

    /// Posterior over the latent function values (prior times likelihood).
    pub fn posterior(&self) -> Result<GpPosterior<'_>> {
        Ok(GpPosterior {
            model: self,
            chol: self.cholesky()?,
        })
    }
}

pub struct GpPosterior<'a> {
    model: &'a GpRegression,
    chol: LowerTriangular<f64>,
}

impl GpPosterior<'_> {
    pub fn chol(&self) -> &LowerTriangular<f64> {
        &self.chol
    }
}

impl LogDensity<f64> for GpPosterior<'_> {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn log_density(&self, f: &[f64]) -> f64 {
        let z = self.chol.solve_lower(f);
        let quad: f64 = z.iter().map(|v| v * v).sum();
        -0.5 * quad + self.model.log_likelihood(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> GpRegression {
        let mut rng = RngState::new(1);
        GpRegression::new(GpRegression::generate_data(&mut rng, 100, 0.2))
    }

    #[test]
    fn kernel_is_spd_and_factorizes() {
        let m = model();
        let k = m.kernel_matrix();
        assert_eq!(k, k.transpose());
        let l = m.cholesky().unwrap();
        for (i, j) in [(0, 0), (3, 7), (50, 51), (99, 10)] {
            let v: f64 = (0..100).map(|r| l.get(i, r) * l.get(j, r)).sum();
            assert!((v - k[(i, j)]).abs() < 1e-10);
        }
    }

    #[test]
    fn prior_term_inverts_the_factor() {
        // For f = L z the prior quadratic form is |z|^2.
        let m = model();
        let post = m.posterior().unwrap();
        let mut rng = RngState::new(2);
        for _ in 0..100 {
            let z: Vec<f64> = (0..100).map(|_| standard_normal(&mut rng)).collect();
            let f = post.chol().mul_vec(&z);
            let expect = -0.5 * z.iter().map(|v| v * v).sum::<f64>() + m.log_likelihood(&f);
            let got = post.log_density(&f);
            assert!(
                (got - expect).abs() < 1e-6 * expect.abs().max(1.0),
                "{got} vs {expect}"
            );
        }
    }

    #[test]
    fn data_shape() {
        let m = model();
        assert_eq!(m.data.x.len(), 100);
        assert_eq!(m.data.x[0], 0.0);
        assert_eq!(m.data.x[99], 1.0);
        assert_eq!(
            m.rmse_to_truth(
                &m.data
                    .x
                    .iter()
                    .map(|&x| GpRegression::truth(x))
                    .collect::<Vec<_>>()
            ),
            0.0
        );
    }
}
