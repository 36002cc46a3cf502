//! Window kernel for unnormalized probability mass functions on the integers
//! `floor, floor + 1, ...`.
//!
//! From `x`, draw `l` uniformly from `{x, ..., x + k - 1}`, then draw `y`
//! from the target restricted to `{max(floor, l - k + 1), ..., l}`. The
//! resulting kernel is
//!
//! ```text
//! P(x -> y) = pi(y)/k * sum_{l = max(x,y)}^{min(x,y) + k - 1} 1 / sum_{z = max(floor, l-k+1)}^{l} pi(z)
//! ```
//!
//! which is reversible with respect to `pi` and needs no accept/reject step.

use crate::error::{Error, Result};
use crate::rng::UniformSource;
use crate::scalar::{log_sum_exp, Field, Scalar};

/// Unnormalized log pmf on `{support_floor, support_floor + 1, ...}`.
pub trait DiscreteTarget<T: Scalar> {
    fn log_pmf(&self, x: usize) -> T;

    fn support_floor(&self) -> usize {
        0
    }
}

impl<T: Scalar, D: DiscreteTarget<T> + ?Sized> DiscreteTarget<T> for &D {
    fn log_pmf(&self, x: usize) -> T {
        (**self).log_pmf(x)
    }

    fn support_floor(&self) -> usize {
        (**self).support_floor()
    }
}

/// Finite table of log masses starting at `floor`; zero mass beyond the table.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPmf<T> {
    floor: usize,
    log_mass: Vec<T>,
}

impl<T: Scalar> TabulatedPmf<T> {
    pub fn from_log_mass(floor: usize, log_mass: Vec<T>) -> Self {
        TabulatedPmf { floor, log_mass }
    }

    pub fn from_mass(floor: usize, mass: &[T]) -> Self {
        TabulatedPmf {
            floor,
            log_mass: mass.iter().map(|m| m.ln()).collect(),
        }
    }

    pub fn floor(&self) -> usize {
        self.floor
    }

    /// Last state with (possibly) positive mass.
    pub fn top(&self) -> usize {
        self.floor + self.log_mass.len().saturating_sub(1)
    }
}

impl<T: Scalar> DiscreteTarget<T> for TabulatedPmf<T> {
    fn log_pmf(&self, x: usize) -> T {
        x.checked_sub(self.floor)
            .and_then(|i| self.log_mass.get(i).copied())
            .unwrap_or_else(T::neg_infinity)
    }

    fn support_floor(&self) -> usize {
        self.floor
    }
}

/// Closure-backed target, evaluated lazily on the windows the kernel visits.
pub struct FnTarget<F> {
    floor: usize,
    f: F,
}

impl<F> FnTarget<F> {
    pub fn new(floor: usize, f: F) -> Self {
        FnTarget { floor, f }
    }
}

impl<T: Scalar, F: Fn(usize) -> T> DiscreteTarget<T> for FnTarget<F> {
    fn log_pmf(&self, x: usize) -> T {
        (self.f)(x)
    }

    fn support_floor(&self) -> usize {
        self.floor
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowKernelConfig {
    pub k: usize,
}

impl WindowKernelConfig {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("k", 0.0));
        }
        Ok(WindowKernelConfig { k })
    }
}

fn window_start(l: usize, k: usize, floor: usize) -> usize {
    (l + 1).saturating_sub(k).max(floor)
}

/// One transition from `x`. Always returns a state; `|y - x| < k`.
pub fn discrete_step<T, D, U>(x: usize, target: &D, k: usize, src: &mut U) -> Result<usize>
where
    T: Scalar,
    D: DiscreteTarget<T> + ?Sized,
    U: UniformSource + ?Sized,
{
    if k == 0 {
        return Err(Error::param("k", 0.0));
    }
    let floor = target.support_floor();
    if x < floor {
        return Err(Error::InvalidState(format!(
            "state {x} is below the support floor {floor}"
        )));
    }
    let offset = ((src.next_unit() * k as f64) as usize).min(k - 1);
    let l = x + offset;
    let start = window_start(l, k, floor);
    let log_mass: Vec<f64> = (start..=l).map(|z| target.log_pmf(z).as_f64()).collect();
    crate::rng::categorical_log(src, &log_mass)
        .map(|i| start + i)
        .ok_or(Error::EmptyWindow { x })
}

/// Exact `P(x -> y)`; zero when `|y - x| >= k`. Window sums are accumulated
/// in log space.
pub fn transition_probability<T, D>(x: usize, y: usize, target: &D, k: usize) -> T
where
    T: Scalar,
    D: DiscreteTarget<T> + ?Sized,
{
    let floor = target.support_floor();
    if k == 0 || x < floor || y < floor || x.abs_diff(y) >= k {
        return T::zero();
    }
    let log_y = target.log_pmf(y);
    if log_y == T::neg_infinity() {
        return T::zero();
    }
    let k_t = T::of(k as f64);
    let terms = (x.max(y)..=x.min(y) + k - 1).map(|l| {
        let window = (window_start(l, k, floor)..=l).map(|z| target.log_pmf(z));
        log_y - log_sum_exp(window)
    });
    let total = log_sum_exp(terms.collect::<Vec<_>>());
    (total - k_t.ln()).exp()
}

/// Probabilities of every reachable `y`, as `(y, P(x -> y))` pairs.
pub fn transition_row<T, D>(x: usize, target: &D, k: usize) -> Vec<(usize, T)>
where
    T: Scalar,
    D: DiscreteTarget<T> + ?Sized,
{
    let floor = target.support_floor();
    let lo = (x + 1).saturating_sub(k).max(floor);
    (lo..x + k)
        .map(|y| (y, transition_probability(x, y, target, k)))
        .collect()
}

/// `max |P(x->y) pi(x) - P(y->x) pi(y)|` over all pairs of a finite table.
pub fn detailed_balance_residual<T: Scalar>(target: &TabulatedPmf<T>, k: usize) -> T {
    let states = target.floor()..=target.top();
    let mut worst = T::zero();
    for x in states.clone() {
        for y in states.clone() {
            if x.abs_diff(y) >= k {
                continue;
            }
            let forward = transition_probability(x, y, target, k) * target.log_pmf(x).exp();
            let backward = transition_probability(y, x, target, k) * target.log_pmf(y).exp();
            let r = (forward - backward).abs();
            if r > worst {
                worst = r;
            }
        }
    }
    worst
}

/// The same kernel over plain masses in any field, for exact (rational)
/// evaluation. `mass[i]` is the mass of state `floor + i`; zero beyond.
pub mod exact {
    use super::*;

    fn mass_at<T: Field>(mass: &[T], floor: usize, z: usize) -> T {
        z.checked_sub(floor)
            .and_then(|i| mass.get(i).cloned())
            .unwrap_or_else(T::zero)
    }

    pub fn transition_probability<T: Field>(
        x: usize,
        y: usize,
        mass: &[T],
        floor: usize,
        k: usize,
    ) -> T {
        if k == 0 || x < floor || y < floor || x.abs_diff(y) >= k {
            return T::zero();
        }
        let mut k_t = T::zero();
        for _ in 0..k {
            k_t = k_t + T::one();
        }
        let mut acc = T::zero();
        for l in x.max(y)..=x.min(y) + k - 1 {
            let mut window = T::zero();
            for z in window_start(l, k, floor)..=l {
                window = window + mass_at(mass, floor, z);
            }
            acc = acc + T::one() / window;
        }
        mass_at(mass, floor, y) * acc / k_t
    }

    pub fn detailed_balance_residual<T: Field>(mass: &[T], floor: usize, k: usize) -> T {
        let mut worst = T::zero();
        for i in 0..mass.len() {
            for j in 0..mass.len() {
                let (x, y) = (floor + i, floor + j);
                let f = transition_probability(x, y, mass, floor, k) * mass[i].clone();
                let b = transition_probability(y, x, mass, floor, k) * mass[j].clone();
                let r = if f > b { f - b } else { b - f };
                if r > worst {
                    worst = r;
                }
            }
        }
        worst
    }
}
