use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::latent::{latent_location_map, latent_window, sample_scale_conditional};
use crate::rng::{standard_normal, RngState, UniformSource};
use crate::scalar::Scalar;

use super::shrink_1d;

/// Dense lower-triangular factor `L` of a prior covariance `L L^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular<T> {
    n: usize,
    /// Row-major `n x n`; entries above the diagonal are ignored.
    data: Vec<T>,
}

impl<T: Scalar> LowerTriangular<T> {
    pub fn from_row_major(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        for i in 0..n {
            let d = data[i * n + i];
            if !(d > T::zero()) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite);
            }
        }
        Ok(LowerTriangular { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![T::zero(); n * n];
        (0..n).for_each(|i| data[i * n + i] = T::one());
        LowerTriangular { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, z: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                let row = &self.data[i * self.n..i * self.n + i + 1];
                row.iter().zip(z).map(|(&a, &b)| a * b).sum()
            })
            .collect()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if j > i {
            T::zero()
        } else {
            self.data[i * self.n + j]
        }
    }

    /// Forward substitution: `z` with `L z = b`.
    pub fn solve_lower(&self, b: &[T]) -> Vec<T> {
        let mut z = Vec::with_capacity(self.n);
        for (i, &bi) in b.iter().enumerate().take(self.n) {
            let row = &self.data[i * self.n..i * self.n + i];
            let partial: T = row.iter().zip(&z).map(|(&a, &v)| a * v).sum();
            z.push((bi - partial) / self.data[i * self.n + i]);
        }
        z
    }

    /// `Sigma_ii = sum_j L_ij^2`.
    pub fn covariance_diagonal(&self) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..i * self.n + i + 1]
                    .iter()
                    .map(|&v| v * v)
                    .sum()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EllipticalVariant {
    /// Bracket `[theta - 2 pi, theta]` with shrinkage toward 0.
    Standard,
    /// Angle drawn by the latent slice machinery anchored at 0.
    LatentSlice,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticalConfig<T> {
    pub variant: EllipticalVariant,
    /// Rate of the angle-scale prior (latent-slice variant only).
    pub lambda: T,
    pub max_shrink_iters: usize,
}

impl<T: Scalar> EllipticalConfig<T> {
    pub fn new(variant: EllipticalVariant) -> Self {
        EllipticalConfig {
            variant,
            // Mean angle scale 2/lambda = 2 pi, one full turn.
            lambda: T::of(1.0 / PI),
            max_shrink_iters: 10_000,
        }
    }
}

/// Latent vector on the ellipse, its cached log-likelihood and the carried
/// angle scale of the latent-slice variant.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipseState<T> {
    f: Vec<T>,
    log_lik: T,
    theta_scale: T,
}

impl<T: Scalar> EllipseState<T> {
    pub fn new<L: Fn(&[T]) -> T>(f: Vec<T>, log_lik: L) -> Result<Self> {
        let ll = log_lik(&f);
        if !ll.is_finite() {
            return Err(Error::InvalidState(format!(
                "log-likelihood {ll} at the initial state"
            )));
        }
        Ok(EllipseState {
            f,
            log_lik: ll,
            theta_scale: T::of(PI),
        })
    }

    pub fn f(&self) -> &[T] {
        &self.f
    }

    pub fn log_lik(&self) -> T {
        self.log_lik
    }

    pub fn theta_scale(&self) -> T {
        self.theta_scale
    }
}

/// `f cos(theta) + nu sin(theta)`.
pub fn ellipse_point<T: Scalar>(f: &[T], nu: &[T], theta: T) -> Vec<T> {
    let (s, c) = theta.sin_cos();
    f.iter().zip(nu).map(|(&a, &b)| a * c + b * s).collect()
}

/// Maps an angle onto `[-pi, pi]`.
pub fn wrap_angle<T: Scalar>(theta: T) -> T {
    let two_pi = T::of(2.0 * PI);
    let pi = T::of(PI);
    let mut t = theta % two_pi;
    if t > pi {
        t = t - two_pi;
    } else if t < -pi {
        t = t + two_pi;
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseStepReport<T> {
    /// Accepted angle, wrapped to `[-pi, pi]`.
    pub theta: T,
    pub log_level: T,
    pub proposals: usize,
}

/// One elliptical slice update under the prior `N(0, L L^T)`.
pub fn elliptical_step<T, L>(
    state: &mut EllipseState<T>,
    chol: &LowerTriangular<T>,
    log_lik: L,
    cfg: &EllipticalConfig<T>,
    rng: &mut RngState,
) -> Result<EllipseStepReport<T>>
where
    T: Scalar,
    L: Fn(&[T]) -> T,
{
    if chol.dim() != state.f.len() {
        return Err(Error::DimensionMismatch {
            expected: chol.dim(),
            got: state.f.len(),
        });
    }
    let z: Vec<T> = (0..chol.dim())
        .map(|_| T::of(standard_normal(rng)))
        .collect();
    let nu = chol.mul_vec(&z);
    let log_level = state.log_lik + T::of(rng.next_open_unit().ln());

    let mut accepted_ll = state.log_lik;
    let mut in_slice = |theta: T| {
        let ll = log_lik(&ellipse_point(&state.f, &nu, theta));
        accepted_ll = ll;
        ll > log_level
    };

    let (theta, proposals) = match cfg.variant {
        EllipticalVariant::Standard => {
            let two_pi = T::of(2.0 * PI);
            let first = two_pi * T::of(rng.next_unit());
            if in_slice(first) {
                (first, 1)
            } else {
                // Rejected first angle is the top of the bracket [first - 2pi, first].
                let (t, n) = shrink_1d(
                    rng,
                    first - two_pi,
                    first,
                    T::zero(),
                    in_slice,
                    cfg.max_shrink_iters,
                )?;
                (t, n + 1)
            }
        }
        EllipticalVariant::LatentSlice => {
            let l = latent_location_map(T::zero(), state.theta_scale, T::of(rng.next_unit()));
            let s = sample_scale_conditional(rng, l, T::zero(), cfg.lambda)?;
            state.theta_scale = s;
            let (lo, hi) = latent_window(l, s);
            shrink_1d(rng, lo, hi, T::zero(), in_slice, cfg.max_shrink_iters)?
        }
    };

    state.f = ellipse_point(&state.f, &nu, theta);
    state.log_lik = accepted_ll;
    Ok(EllipseStepReport {
        theta: wrap_angle(theta),
        log_level,
        proposals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_zero_and_quarter_turn() {
        let f = [1.0, -2.0, 0.5];
        let nu = [0.3, 0.1, -4.0];
        assert_eq!(ellipse_point(&f, &nu, 0.0), f.to_vec());
        let q = ellipse_point(&f, &nu, PI / 2.0);
        for (a, b) in q.iter().zip(nu) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn wraps_angles() {
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!((wrap_angle(-3.0 * PI / 2.0) - PI / 2.0).abs() < 1e-12);
        assert_eq!(wrap_angle(0.25), 0.25);
    }

    #[test]
    fn accepted_states_satisfy_the_slice() {
        let chol = LowerTriangular::<f64>::identity(4);
        let ll = |f: &[f64]| -0.5 * f.iter().map(|v| (v - 1.0).powi(2)).sum::<f64>() / 0.1;
        for variant in [EllipticalVariant::Standard, EllipticalVariant::LatentSlice] {
            let cfg = EllipticalConfig::new(variant);
            let mut rng = RngState::new(3);
            let mut state = EllipseState::new(vec![0.0; 4], ll).unwrap();
            for _ in 0..2_000 {
                let r = elliptical_step(&mut state, &chol, ll, &cfg, &mut rng).unwrap();
                assert!(state.log_lik() > r.log_level);
                assert_eq!(state.log_lik(), ll(state.f()));
                assert!(r.theta.abs() <= PI);
            }
        }
    }

    #[test]
    fn factor_validation() {
        assert!(LowerTriangular::from_row_major(2, vec![1.0, 0.0, 0.5]).is_err());
        assert!(LowerTriangular::from_row_major(2, vec![1.0, 0.0, 0.5, 0.0]).is_err());
        let l = LowerTriangular::from_row_major(2, vec![2.0, 9.0, 0.5, 1.0]).unwrap();
        assert_eq!(l.mul_vec(&[1.0, 1.0]), vec![2.0, 1.5]);
        assert_eq!(l.covariance_diagonal(), vec![4.0, 1.25]);
    }
}
