//! Scalar abstraction shared by the geometric and rendering code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar used by meshes, crack geometry and the rasterizer.
///
/// Implemented for `f32` and `f64`. The pipeline itself runs on `f64`; the
/// `f32` instantiation is there for memory-bound rendering of large meshes.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant. Never fails for the supported types.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Clamps `v` into `[lo, hi]`.
#[inline]
pub fn clamp<S: Real>(v: S, lo: S, hi: S) -> S {
    v.max(lo).min(hi)
}

/// Linear interpolation `a + (b - a) * t`.
#[inline]
pub fn lerp<S: Real>(a: S, b: S, t: S) -> S {
    a + (b - a) * t
}
