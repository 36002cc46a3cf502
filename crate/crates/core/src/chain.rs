use serde::Serialize;

use crate::error::{Error, Result};

/// Retained draws of one chain, plus per-iteration shrinkage counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainOutput<T> {
    dim: usize,
    /// Row-major `n_kept x dim`.
    samples: Vec<T>,
    /// 1-based iteration number of each retained row.
    iterations: Vec<usize>,
    /// Proposals spent by the shrink loop in every iteration, burn-in included.
    pub shrink_counts: Vec<usize>,
    pub wall_time: f64,
}

impl<T: Copy> ChainOutput<T> {
    pub(crate) fn with_capacity(dim: usize, rows: usize, iters: usize) -> Self {
        ChainOutput {
            dim,
            samples: Vec::with_capacity(rows * dim),
            iterations: Vec::with_capacity(rows),
            shrink_counts: Vec::with_capacity(iters),
            wall_time: 0.0,
        }
    }

    pub(crate) fn push(&mut self, iteration: usize, row: &[T]) {
        debug_assert_eq!(row.len(), self.dim);
        self.samples.extend_from_slice(row);
        self.iterations.push(iteration);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_kept(&self) -> usize {
        self.iterations.len()
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.samples[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.samples.chunks_exact(self.dim.max(1))
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn iterations(&self) -> &[usize] {
        &self.iterations
    }

    pub fn mean_shrink_count(&self) -> f64 {
        if self.shrink_counts.is_empty() {
            return 0.0;
        }
        self.shrink_counts.iter().sum::<usize>() as f64 / self.shrink_counts.len() as f64
    }
}

/// Iteration bookkeeping shared by every chain driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunLength {
    pub n_iter: usize,
    pub burn_in: usize,
    pub thin: usize,
}

impl RunLength {
    pub fn new(n_iter: usize, burn_in: usize, thin: usize) -> Result<Self> {
        if n_iter <= burn_in {
            return Err(Error::param("n_iter", n_iter as f64));
        }
        if thin == 0 {
            return Err(Error::param("thin", 0.0));
        }
        Ok(RunLength {
            n_iter,
            burn_in,
            thin,
        })
    }

    /// `floor((n_iter - burn_in) / thin)`.
    pub fn n_kept(&self) -> usize {
        (self.n_iter - self.burn_in) / self.thin
    }

    /// Whether 1-based iteration `it` is retained.
    pub fn keeps(&self, it: usize) -> bool {
        it > self.burn_in && (it - self.burn_in).is_multiple_of(self.thin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_length_counts() {
        let r = RunLength::new(10, 0, 1).unwrap();
        assert_eq!(r.n_kept(), 10);
        assert_eq!((1..=10).filter(|&i| r.keeps(i)).count(), 10);
        let r = RunLength::new(4_000_000, 0, 200).unwrap();
        assert_eq!(r.n_kept(), 20_000);
        let r = RunLength::new(107, 3, 5).unwrap();
        assert_eq!((1..=107).filter(|&i| r.keeps(i)).count(), r.n_kept());
        assert!(RunLength::new(5, 5, 1).is_err());
        assert!(RunLength::new(5, 0, 0).is_err());
    }
}
