//! Floating-point scalar abstraction: f32 or f64.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar type underlying all complex arithmetic in this crate.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Convert an f64 constant (tolerances, literals) into the working scalar.
#[inline]
pub fn real<F: Scalar>(x: f64) -> F {
    F::from_f64(x).expect("constant representable in scalar type")
}
