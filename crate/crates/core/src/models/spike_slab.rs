use crate::density::LogDensity;
use crate::rng::{standard_normal, RngState};
use crate::scalar::log_sum_exp;

use super::DesignData;

/// Linear regression with the two-component spike-and-slab prior
/// `prod_j [sigma_1^{-1} exp(-b_j^2 / 2 sigma_1^2) + sigma_2^{-1} exp(-b_j^2 / 2 sigma_2^2)]`
/// and known noise `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeSlab {
    pub data: DesignData,
    pub sigma: f64,
    pub spike_sd: f64,
    pub slab_sd: f64,
}

impl SpikeSlab {
    pub fn new(data: DesignData) -> Self {
        SpikeSlab {
            data,
            sigma: 1.0,
            spike_sd: 0.1,
            slab_sd: 10.0,
        }
    }

    /// `beta_1 = 1`, `beta_2..5 = 5`, the rest zero.
    pub fn true_beta(p: usize) -> Vec<f64> {
        (0..p)
            .map(|j| match j {
                0 => 1.0,
                1..=4 => 5.0,
                _ => 0.0,
            })
            .collect()
    }

    pub fn generate_data(rng: &mut RngState, n: usize, p: usize, sigma: f64) -> DesignData {
        let beta = Self::true_beta(p);
        let x: Vec<f64> = (0..n * p).map(|_| standard_normal(rng)).collect();
        let y = (0..n)
            .map(|i| {
                let row = &x[i * p..(i + 1) * p];
                row.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>()
                    + sigma * standard_normal(rng)
            })
            .collect();
        DesignData { n, p, x, y }
    }

    pub fn log_prior(&self, beta: &[f64]) -> f64 {
        let (s1, s2) = (self.spike_sd, self.slab_sd);
        beta.iter()
            .map(|&b| {
                log_sum_exp([
                    -s1.ln() - 0.5 * b * b / (s1 * s1),
                    -s2.ln() - 0.5 * b * b / (s2 * s2),
                ])
            })
            .sum()
    }

    pub fn log_likelihood(&self, beta: &[f64]) -> f64 {
        let p = self.data.p;
        let rss: f64 = self
            .data
            .y
            .iter()
            .enumerate()
            .map(|(i, &yi)| {
                let fit: f64 = self.data.x[i * p..(i + 1) * p]
                    .iter()
                    .zip(beta)
                    .map(|(a, b)| a * b)
                    .sum();
                (yi - fit) * (yi - fit)
            })
            .sum();
        -0.5 * rss / (self.sigma * self.sigma)
    }
}

impl LogDensity<f64> for SpikeSlab {
    fn dim(&self) -> usize {
        self.data.p
    }

    fn log_density(&self, beta: &[f64]) -> f64 {
        self.log_likelihood(beta) + self.log_prior(beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn truth_layout() {
        let b = SpikeSlab::true_beta(90);
        assert_eq!(b.len(), 90);
        assert_eq!(b[0], 1.0);
        assert!(b[1..5].iter().all(|&v| v == 5.0));
        assert!(b[5..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn log_density_matches_matrix_oracle() {
        let mut rng = RngState::new(6);
        let data = SpikeSlab::generate_data(&mut rng, 100, 90, 1.0);
        let model = SpikeSlab::new(data.clone());
        let x = DMatrix::from_row_slice(100, 90, &data.x);
        let y = DVector::from_vec(data.y.clone());
        for _ in 0..100 {
            let b: Vec<f64> = (0..90).map(|_| 3.0 * standard_normal(&mut rng)).collect();
            let r = &y - &x * DVector::from_vec(b.clone());
            let prior: f64 = b
                .iter()
                .map(|&v| {
                    (10.0 * (-0.5 * v * v / 0.01f64).exp() + 0.1 * (-0.5 * v * v / 100.0f64).exp())
                        .ln()
                })
                .sum();
            let expect = -0.5 * r.norm_squared() + prior;
            let got = model.log_density(&b);
            assert!(
                (got - expect).abs() < 1e-10 * expect.abs().max(1.0),
                "{got} vs {expect}"
            );
        }
    }

    #[test]
    fn empty_data_leaves_the_prior() {
        let model = SpikeSlab::new(DesignData {
            n: 0,
            p: 3,
            x: vec![],
            y: vec![],
        });
        let b = [0.3, -0.3, 2.0];
        assert_eq!(model.log_likelihood(&b), 0.0);
        assert_eq!(model.log_density(&b), model.log_density(&[-0.3, 0.3, -2.0]));
    }
}
