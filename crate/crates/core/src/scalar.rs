//! Floating-point type used for rewards and action values.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Anything usable as a reward or Q-value: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Display + Debug + FromStr + Sum + Send + Sync + 'static
{
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("representable constant")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Display + Debug + FromStr + Sum + Send + Sync + 'static
{
}
