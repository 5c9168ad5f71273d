//! Scalar abstraction so the whole engine runs on `f32` or `f64`.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the library is generic over.
///
/// Everything downstream (positions, weights, tolerances) is expressed in
/// terms of this trait; `f64` is the default choice, `f32` works for quick
/// low-precision runs.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + std::fmt::Debug
    + std::fmt::Display
    + std::fmt::LowerExp
    + std::iter::Sum
    + Send
    + Sync
    + 'static
{
    /// Lift an `f64` literal into this scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar not representable as f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over the generic scalar.
pub type Cplx<F> = Complex<F>;

/// Relative atom-coalescing tolerance: two atoms closer than this merge.
pub fn coalesce_tol<F: Scalar>(position: F) -> F {
    F::lit(1e-9) * F::one().max(position.abs())
}
