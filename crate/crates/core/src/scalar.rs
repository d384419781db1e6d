//! Scalar abstraction for the numerical kernels.
//!
//! Everything in this crate is generic over [`Scalar`], a floating-point-like
//! field type. `f32` and `f64` cover ordinary work; [`crate::dd::Dd`] is a
//! double-double type (~31 significant decimal digits) used where Gramian
//! spectra fall below the `f64` resolution floor.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Floating-point scalar usable by every solver in the crate.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Display
    + LowerExp
    + Debug
    + Default
    + 'static
{
    /// Lossy conversion from `f64`, for tolerances and literal constants.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }

    /// Conversion from a count.
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("count representable in scalar type")
    }

    /// Best-effort `f64` view, for reporting.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
