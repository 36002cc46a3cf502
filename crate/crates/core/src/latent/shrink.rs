use crate::error::{Error, Result};
use crate::rng::UniformSource;
use crate::scalar::Scalar;

/// Axis-aligned box `(lower, upper)` that the shrinkage loop tightens around
/// an anchor point.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkBox<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> ShrinkBox<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if let Some((a, b)) = lower.iter().zip(&upper).find(|(a, b)| !(*a < *b)) {
            return Err(Error::InvalidInterval {
                lo: a.as_f64(),
                hi: b.as_f64(),
            });
        }
        Ok(ShrinkBox { lower, upper })
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn volume(&self) -> T {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&a, &b)| b - a)
            .fold(T::one(), |v, w| v * w)
    }

    /// Whether `y` lies in the closed box.
    pub fn contains(&self, y: &[T]) -> bool {
        y.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&v, (&a, &b))| a <= v && v <= b)
    }

    /// Uniform proposal in the box, written into `out`.
    pub fn propose_into<U: UniformSource + ?Sized>(&self, src: &mut U, out: &mut [T]) {
        for ((o, &a), &b) in out.iter_mut().zip(&self.lower).zip(&self.upper) {
            *o = a + (b - a) * T::of(src.next_unit());
        }
    }

    /// Pulls each side toward `anchor` past a rejected proposal. A coordinate
    /// equal to the anchor counts as "not below" and tightens the upper side.
    pub fn shrink_toward(&mut self, rejected: &[T], anchor: &[T]) {
        for (j, (&r, &y0)) in rejected.iter().zip(anchor).enumerate() {
            if r < y0 {
                if r > self.lower[j] {
                    self.lower[j] = r;
                }
            } else if r < self.upper[j] {
                self.upper[j] = r;
            }
        }
    }
}

/// Result of one shrinkage run.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkOutcome<T> {
    pub point: Vec<T>,
    /// Proposals drawn, the accepted one included.
    pub proposals: usize,
}

/// Samples uniformly from `{y in box : in_slice(y)}` by shrinking the box
/// toward `anchor` after every rejection.
///
/// `anchor` must be inside the box and inside the slice; it stays inside the
/// box throughout. Fails with [`Error::ShrinkStall`] after `max_iters`
/// rejected proposals.
pub fn shrink_sample<T, U, F>(
    src: &mut U,
    bounds: &mut ShrinkBox<T>,
    anchor: &[T],
    mut in_slice: F,
    max_iters: usize,
) -> Result<ShrinkOutcome<T>>
where
    T: Scalar,
    U: UniformSource + ?Sized,
    F: FnMut(&[T]) -> bool,
{
    if anchor.len() != bounds.dim() {
        return Err(Error::DimensionMismatch {
            expected: bounds.dim(),
            got: anchor.len(),
        });
    }
    let mut proposal = vec![T::zero(); anchor.len()];
    for proposals in 1..=max_iters {
        bounds.propose_into(src, &mut proposal);
        if in_slice(&proposal) {
            return Ok(ShrinkOutcome {
                point: proposal,
                proposals,
            });
        }
        bounds.shrink_toward(&proposal, anchor);
    }
    Err(Error::ShrinkStall {
        proposals: max_iters,
    })
}
