//! Scalar abstraction for the numeric layer.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar used for probabilities, rates and densities.
///
/// Implemented by `f32` and `f64`; all probability arithmetic in the crate
/// is written against this trait.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}
