use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type the Gram and spectral routines are generic over.
///
/// Implemented for `f32` and `f64`. Eigenvalues are irrational in general, so
/// exact rational scalars are not supported.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + serde::Serialize
    + ndarray::ScalarOperand
    + 'static
{
    /// Converts an `f64` constant, panicking only for non-representable values.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }

    /// Converts a count.
    #[inline]
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance below which negative eigenvalues are treated as round-off.
    #[inline]
    fn negative_eigen_tolerance() -> Self {
        Self::lit(1e-9).max(Self::epsilon() * Self::lit(64.0))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
