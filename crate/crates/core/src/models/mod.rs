//! Target densities and data generators for every experiment.

mod data;
mod gp;
mod spike_slab;
mod state_space;

use std::f64::consts::PI;

pub use data::{CountSeries, DesignData, RegressionData, UnivariateSample};
pub use gp::GpRegression;
pub use spike_slab::SpikeSlab;
pub use state_space::StateSpace;

use crate::density::LogDensity;
use crate::scalar::{log_sum_exp, Scalar};

/// `log N(x | mean, var)`.
pub fn log_normal_pdf<T: Scalar>(x: T, mean: T, var: T) -> T {
    let d = x - mean;
    -T::of(0.5) * (d * d / var + (T::of(2.0 * PI) * var).ln())
}

/// Equal-weight mixture of `N(-10, 1)` and `N(10, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BimodalMixture<T> {
    pub separation: T,
}

impl<T: Scalar> Default for BimodalMixture<T> {
    fn default() -> Self {
        BimodalMixture {
            separation: T::of(10.0),
        }
    }
}

impl<T: Scalar> LogDensity<T> for BimodalMixture<T> {
    fn dim(&self) -> usize {
        1
    }

    fn log_density(&self, y: &[T]) -> T {
        let half = T::of(0.5).ln();
        log_sum_exp([
            half + log_normal_pdf(y[0], -self.separation, T::one()),
            half + log_normal_pdf(y[0], self.separation, T::one()),
        ])
    }
}

/// Zero-mean bivariate normal with unit variances and correlation `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatedGaussian<T> {
    pub rho: T,
}

impl<T: Scalar> Default for CorrelatedGaussian<T> {
    fn default() -> Self {
        CorrelatedGaussian { rho: T::of(0.95) }
    }
}

impl<T: Scalar> CorrelatedGaussian<T> {
    pub fn gradient(&self, y: &[T]) -> [T; 2] {
        let det = T::one() - self.rho * self.rho;
        [
            -(y[0] - self.rho * y[1]) / det,
            -(y[1] - self.rho * y[0]) / det,
        ]
    }
}

impl<T: Scalar> LogDensity<T> for CorrelatedGaussian<T> {
    fn dim(&self) -> usize {
        2
    }

    fn log_density(&self, y: &[T]) -> T {
        let det = T::one() - self.rho * self.rho;
        let q = (y[0] * y[0] - T::of(2.0) * self.rho * y[0] * y[1] + y[1] * y[1]) / det;
        -T::of(0.5) * q - T::of(2.0 * PI).ln() - T::of(0.5) * det.ln()
    }
}

/// Standard normal in `dim` dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IsotropicGaussian {
    pub dim: usize,
}

impl Default for IsotropicGaussian {
    fn default() -> Self {
        IsotropicGaussian { dim: 50 }
    }
}

impl<T: Scalar> LogDensity<T> for IsotropicGaussian {
    fn dim(&self) -> usize {
        self.dim
    }

    fn log_density(&self, y: &[T]) -> T {
        let ss: T = y.iter().map(|&v| v * v).sum();
        -T::of(0.5) * (ss + T::of(self.dim as f64 * (2.0 * PI).ln()))
    }
}

/// Funnel: `v ~ N(0, 3^2)`, `x_i | v ~ N(0, e^v)`; coordinates `(v, x_1..)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Funnel<T> {
    pub v_sd: T,
    pub n_x: usize,
}

impl<T: Scalar> Default for Funnel<T> {
    fn default() -> Self {
        Funnel {
            v_sd: T::of(3.0),
            n_x: 9,
        }
    }
}

impl<T: Scalar> LogDensity<T> for Funnel<T> {
    fn dim(&self) -> usize {
        self.n_x + 1
    }

    fn log_density(&self, y: &[T]) -> T {
        let v = y[0];
        let var_x = v.exp();
        let mut lp = log_normal_pdf(v, T::zero(), self.v_sd * self.v_sd);
        for &x in &y[1..] {
            lp = lp + log_normal_pdf(x, T::zero(), var_x);
        }
        if lp.is_nan() {
            T::neg_infinity()
        } else {
            lp
        }
    }
}
