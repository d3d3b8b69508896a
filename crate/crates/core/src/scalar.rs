//! Scalar abstraction shared by every numeric routine in the crate.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};
use std::fmt::Debug;

/// Real scalar the geometry, graph labels and solvers are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances that are stated as absolute
/// numbers (for instance the `1e-9` orthonormality check) are clamped from
/// below by a multiple of the type's machine epsilon so that `f32` remains
/// usable.
pub trait Scalar:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Converts a literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("scalar conversion from f64")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar conversion to f64")
    }

    /// Unit roundoff of the type.
    fn epsilon() -> Self;

    /// `max(tol, k * epsilon)`.
    #[inline]
    fn tolerance(tol: f64, k: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(k);
        let tol = Self::lit(tol);
        if tol > floor {
            tol
        } else {
            floor
        }
    }
}

impl Scalar for f32 {
    #[inline]
    fn epsilon() -> Self {
        f32::EPSILON
    }
}

impl Scalar for f64 {
    #[inline]
    fn epsilon() -> Self {
        f64::EPSILON
    }
}
