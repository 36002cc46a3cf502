//! Chain diagnostics: autocorrelation, effective sample size, goodness of fit
//! and mode occupancy.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MIN_LEN: usize = 10;

fn check_len<T>(series: &[T]) -> Result<()> {
    if series.len() < MIN_LEN {
        return Err(Error::SeriesTooShort {
            needed: MIN_LEN,
            got: series.len(),
        });
    }
    Ok(())
}

pub fn mean<T: Scalar>(series: &[T]) -> T {
    series.iter().copied().sum::<T>() / T::of(series.len() as f64)
}

/// Sample standard deviation (n - 1 denominator).
pub fn sd<T: Scalar>(series: &[T]) -> T {
    let m = mean(series);
    let ss: T = series.iter().map(|&v| (v - m) * (v - m)).sum();
    (ss / T::of(series.len().saturating_sub(1).max(1) as f64)).sqrt()
}

/// Linear-interpolated quantile, `p` in `[0, 1]`.
pub fn quantile<T: Scalar>(series: &[T], p: f64) -> T {
    let mut v = series.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("NaN in series"));
    let h = p.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * T::of(h - lo as f64)
}

/// Biased autocorrelation estimates for lags `0..=max_lag`.
pub fn autocorrelation<T: Scalar>(series: &[T], max_lag: usize) -> Result<Vec<T>> {
    check_len(series)?;
    let n = series.len();
    let m = mean(series);
    let centred: Vec<T> = series.iter().map(|&v| v - m).collect();
    let c0: T = centred.iter().map(|&v| v * v).sum();
    if !(c0 > T::zero()) {
        return Err(Error::DegenerateSeries);
    }
    Ok((0..=max_lag.min(n - 1))
        .map(|h| autocovariance_sum(&centred, h) / c0)
        .collect())
}

fn autocovariance_sum<T: Scalar>(centred: &[T], lag: usize) -> T {
    centred[..centred.len() - lag]
        .iter()
        .zip(&centred[lag..])
        .map(|(&a, &b)| a * b)
        .sum()
}

/// Integrated autocorrelation time `1 + 2 sum rho_h`, summed until the first
/// lag whose autocorrelation is not positive. Never below 1.
pub fn integrated_autocorrelation_time<T: Scalar>(series: &[T]) -> Result<T> {
    check_len(series)?;
    let m = mean(series);
    let centred: Vec<T> = series.iter().map(|&v| v - m).collect();
    let c0: T = centred.iter().map(|&v| v * v).sum();
    if !(c0 > T::zero()) {
        return Err(Error::DegenerateSeries);
    }
    let mut act = T::one();
    for h in 1..series.len() {
        let rho = autocovariance_sum(&centred, h) / c0;
        if rho <= T::zero() {
            break;
        }
        act = act + T::of(2.0) * rho;
    }
    Ok(act.max(T::one()))
}

/// `n / act`, so never above `n`.
pub fn effective_sample_size<T: Scalar>(series: &[T]) -> Result<T> {
    let act = integrated_autocorrelation_time(series)?;
    Ok(T::of(series.len() as f64) / act)
}

/// Every `ceil(n / ess)`-th value: a roughly independent subsample for
/// goodness-of-fit tests on correlated chains.
pub fn decorrelated_subsample<T: Scalar>(series: &[T]) -> Result<Vec<T>> {
    let act = integrated_autocorrelation_time(series)?;
    let stride = act.as_f64().ceil().max(1.0) as usize;
    Ok(series.iter().copied().step_by(stride).collect())
}

/// Kolmogorov-Smirnov distance between the empirical CDF and `cdf`.
pub fn ks_statistic<T: Scalar, F: Fn(T) -> T>(series: &[T], cdf: F) -> Result<T> {
    if series.is_empty() {
        return Err(Error::SeriesTooShort { needed: 1, got: 0 });
    }
    let mut v = series.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("NaN in series"));
    let n = T::of(v.len() as f64);
    Ok(v.iter().enumerate().fold(T::zero(), |d, (i, &x)| {
        let f = cdf(x);
        let above = T::of((i + 1) as f64) / n - f;
        let below = f - T::of(i as f64) / n;
        d.max(above).max(below)
    }))
}

/// Asymptotic one-sample KS critical value `sqrt(-ln(alpha/2)/2) / sqrt(n)`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / (n as f64).sqrt()
}

/// Fraction of values in each region cut by the sorted `boundaries`
/// (`boundaries.len() + 1` regions).
pub fn mode_fraction<T: Scalar>(series: &[T], boundaries: &[T]) -> Result<Vec<T>> {
    check_len(series)?;
    let mut counts = vec![0usize; boundaries.len() + 1];
    for &v in series {
        let region = boundaries.iter().take_while(|&&b| v >= b).count();
        counts[region] += 1;
    }
    let n = T::of(series.len() as f64);
    Ok(counts.into_iter().map(|c| T::of(c as f64) / n).collect())
}

/// Number of times the series crosses `boundary`.
pub fn count_switches<T: Scalar>(series: &[T], boundary: T) -> usize {
    series
        .windows(2)
        .filter(|w| (w[0] < boundary) != (w[1] < boundary))
        .count()
}

/// Pearson chi-square of observed counts against expected counts; returns
/// the statistic and its upper-tail p-value. Cells with zero expectation are
/// skipped.
pub fn chi_square_test(observed: &[f64], expected: &[f64]) -> Result<(f64, f64)> {
    if observed.len() != expected.len() {
        return Err(Error::DimensionMismatch {
            expected: expected.len(),
            got: observed.len(),
        });
    }
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &e) in observed.iter().zip(expected) {
        if e > 0.0 {
            stat += (o - e) * (o - e) / e;
            cells += 1;
        }
    }
    if cells < 2 {
        return Err(Error::SeriesTooShort {
            needed: 2,
            got: cells,
        });
    }
    let dist =
        ChiSquared::new((cells - 1) as f64).map_err(|_| Error::param("dof", cells as f64))?;
    Ok((stat, 1.0 - dist.cdf(stat)))
}

/// Per-dimension summary of a chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub q025: f64,
    pub q50: f64,
    pub q975: f64,
    pub ess: Option<f64>,
    pub act: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks_stat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode_fractions: Option<Vec<f64>>,
}

impl ChainSummary {
    /// ESS and ACT are `None` for constant series.
    pub fn of<T: Scalar>(name: impl Into<String>, series: &[T]) -> Result<Self> {
        check_len(series)?;
        let act = match integrated_autocorrelation_time(series) {
            Ok(a) => Some(a.as_f64()),
            Err(Error::DegenerateSeries) => None,
            Err(e) => return Err(e),
        };
        Ok(ChainSummary {
            name: name.into(),
            mean: mean(series).as_f64(),
            sd: sd(series).as_f64(),
            q025: quantile(series, 0.025).as_f64(),
            q50: quantile(series, 0.5).as_f64(),
            q975: quantile(series, 0.975).as_f64(),
            ess: act.map(|a| series.len() as f64 / a),
            act,
            ks_stat: None,
            mode_fractions: None,
        })
    }
}

/// Gaussian kernel density estimate.
#[derive(Debug, Clone)]
pub struct KernelDensity {
    points: Vec<f64>,
    bandwidth: f64,
}

impl KernelDensity {
    /// Silverman rule-of-thumb bandwidth `0.9 min(sd, IQR/1.34) n^(-1/5)`.
    pub fn silverman(points: &[f64]) -> Result<Self> {
        check_len(points)?;
        let spread = sd(points);
        let iqr = quantile(points, 0.75) - quantile(points, 0.25);
        let scale = if iqr > 0.0 {
            spread.min(iqr / 1.34)
        } else {
            spread
        };
        if !(scale > 0.0) {
            return Err(Error::DegenerateSeries);
        }
        Ok(KernelDensity {
            points: points.to_vec(),
            bandwidth: 0.9 * scale * (points.len() as f64).powf(-0.2),
        })
    }

    /// Bandwidth minimizing the unbiased cross-validation estimate of the
    /// integrated squared error, searched over `[h_s / 20, 1.5 h_s]` where
    /// `h_s` is the Silverman bandwidth.
    pub fn unbiased_cv(points: &[f64]) -> Result<Self> {
        let h_s = Self::silverman(points)?.bandwidth;
        let mut sorted = points.to_vec();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let score = |log_h: f64| ucv_score(&sorted, log_h.exp());

        let (lo, hi) = ((h_s / 20.0).ln(), (1.5 * h_s).ln());
        let steps = 40;
        let grid: Vec<f64> = (0..=steps)
            .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
            .collect();
        let best = (0..=steps)
            .min_by(|&a, &b| score(grid[a]).total_cmp(&score(grid[b])))
            .expect("non-empty grid");
        // Golden-section refinement within the neighbouring grid cells.
        let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(steps)]);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
        let (mut fc, mut fd) = (score(c), score(d));
        for _ in 0..30 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = score(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = score(d);
            }
        }
        Ok(KernelDensity {
            points: points.to_vec(),
            bandwidth: (0.5 * (a + b)).exp(),
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn density(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let norm = 1.0 / (self.points.len() as f64 * h * (2.0 * std::f64::consts::PI).sqrt());
        norm * self
            .points
            .iter()
            .map(|&p| (-0.5 * ((x - p) / h).powi(2)).exp())
            .sum::<f64>()
    }

    pub fn evaluate(&self, grid: &[f64]) -> Vec<f64> {
        grid.iter().map(|&x| self.density(x)).collect()
    }
}

/// Unbiased cross-validation criterion for a Gaussian kernel on sorted
/// points; pairs further apart than `12 h` are dropped.
fn ucv_score(sorted: &[f64], h: f64) -> f64 {
    let n = sorted.len() as f64;
    let reach = 12.0 * h;
    let (mut conv, mut loo) = (0.0, 0.0);
    for (i, &xi) in sorted.iter().enumerate() {
        for &xj in &sorted[i + 1..] {
            let diff = xj - xi;
            if diff > reach {
                break;
            }
            let d2 = (diff / h).powi(2);
            conv += (-0.25 * d2).exp();
            loo += (-0.5 * d2).exp();
        }
    }
    // Off-diagonal pairs are counted twice in both double sums.
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let int_sq = (n + 2.0 * conv) / (2.0 * sqrt_pi * n * n * h);
    let cross = 2.0 * 2.0 * loo / ((2.0 * std::f64::consts::PI).sqrt() * n * (n - 1.0) * h);
    int_sq - cross
}

/// Evenly spaced grid of `n` points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Trapezoid-rule L1 distance between two densities tabulated on `grid`.
pub fn l1_distance(grid: &[f64], a: &[f64], b: &[f64]) -> f64 {
    grid.windows(2)
        .enumerate()
        .map(|(i, w)| 0.5 * (w[1] - w[0]) * ((a[i] - b[i]).abs() + (a[i + 1] - b[i + 1]).abs()))
        .sum()
}

/// Grid locations of strict local maxima whose height exceeds `threshold`.
pub fn local_maxima(grid: &[f64], density: &[f64], threshold: f64) -> Vec<f64> {
    (1..density.len().saturating_sub(1))
        .filter(|&i| {
            density[i] > threshold && density[i] > density[i - 1] && density[i] >= density[i + 1]
        })
        .map(|i| grid[i])
        .collect()
}
