//! Scalar abstraction: the numeric routines are generic over [`Real`],
//! instantiated at `f32` or `f64` (see the aliases at the crate root).

use std::fmt::{Debug, Display};

/// Floating-point scalar used throughout the crate.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Convert an `f64` constant or draw into `T`. Exact for `f64`, rounded for `f32`.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 is representable in every Real type")
}

/// Convert `T` back to `f64` (for error messages and aggregation).
#[inline]
pub fn as_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("Real converts to f64")
}
