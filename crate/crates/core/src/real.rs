//! Scalar abstraction: all numerics are generic over a floating-point type.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the whole crate is generic over.
///
/// `f64` is the intended production type; `f32` works for the algebraic
/// layers but loses too much precision for the iterated kernel integrals.
pub trait Real:
    Float
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Display
    + Debug
    + Send
    + Sync
    + 'static
{
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable in scalar type")
    }

    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64;

    /// Real signed fractional power: `sign(x) * |x|^p`.
    ///
    /// Used for odd-root exponents like eta^(1/(2n-1)) at negative eta.
    fn signed_pow(self, p: Self) -> Self {
        if self < Self::zero() {
            -((-self).powf(p))
        } else {
            self.powf(p)
        }
    }
}

impl Real for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

impl Real for f32 {
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}
