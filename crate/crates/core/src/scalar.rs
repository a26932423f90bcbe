//! Scalar abstraction for the metric quantities of the pipeline.
//!
//! Cell indices, counts and grid geometry stay in integer types; everything
//! measured in meters, pixels or fractions is generic over [`Scalar`] so the
//! same code runs in `f32` or `f64`.

use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + std::fmt::Debug
    + std::fmt::Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Conversion from an `f64` literal; panics on values a float cannot hold
    /// (never the case for the finite constants used here).
    fn cast_f64(v: f64) -> Self {
        num_traits::FromPrimitive::from_f64(v).expect("finite literal")
    }

    /// Exact-for-small-integers conversion used for cell counts and indices.
    fn cast_usize(v: usize) -> Self {
        num_traits::FromPrimitive::from_usize(v).expect("index fits in scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Total ordering for finite scalars. Inputs are validated to be finite at
/// construction time, so `partial_cmp` cannot fail in practice.
pub fn cmp_scalar<S: Scalar>(a: S, b: S) -> std::cmp::Ordering {
    a.partial_cmp(&b).expect("finite scalars are totally ordered")
}
