use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Floating point scalar the samplers run in: `f32` or `f64`.
///
/// Randomness is always generated at `f64` precision and narrowed with
/// [`Scalar::of`], so an `f32` chain and an `f64` chain seeded alike see the
/// same uniforms.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal or draw into this scalar.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Field arithmetic only. Implemented by the float scalars and by exact
/// rationals, so interval constructions and kernel probabilities can be
/// checked for exact agreement.
pub trait Field: Clone + PartialOrd + Num + Debug {}

impl<T: Clone + PartialOrd + Num + Debug> Field for T {}

pub(crate) fn half<T: Field>() -> T {
    T::one() / (T::one() + T::one())
}

pub(crate) fn log_sum_exp<T: Scalar>(values: impl IntoIterator<Item = T> + Clone) -> T {
    let max = values
        .clone()
        .into_iter()
        .fold(T::neg_infinity(), |m, v| if v > m { v } else { m });
    if max == T::neg_infinity() {
        return max;
    }
    let sum: T = values.into_iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}
