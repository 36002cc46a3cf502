use crate::scalar::Scalar;

/// Unnormalized log target over a fixed-dimension real space.
///
/// `log_density` must be pure, must never return NaN, and returns `-inf`
/// outside the support. Implementations are `Sync` so independent chains can
/// share one target.
pub trait LogDensity<T: Scalar>: Sync {
    fn dim(&self) -> usize;

    fn log_density(&self, y: &[T]) -> T;
}

impl<T: Scalar, D: LogDensity<T> + ?Sized> LogDensity<T> for &D {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn log_density(&self, y: &[T]) -> T {
        (**self).log_density(y)
    }
}

/// Adapts a closure into a [`LogDensity`].
#[derive(Clone)]
pub struct FnDensity<F> {
    dim: usize,
    f: F,
}

impl<F> FnDensity<F> {
    pub fn new(dim: usize, f: F) -> Self {
        assert!(dim >= 1, "a log density needs at least one dimension");
        FnDensity { dim, f }
    }
}

impl<T, F> LogDensity<T> for FnDensity<F>
where
    T: Scalar,
    F: Fn(&[T]) -> T + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn log_density(&self, y: &[T]) -> T {
        (self.f)(y)
    }
}
