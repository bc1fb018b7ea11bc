//! Scalar abstraction shared by the numerical kernels.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the kernels are generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Default relative residual bound accepted from the eigensolver.
    ///
    /// `eps^(2/3)`: 3.7e-11 for `f64`, 2.4e-5 for `f32`.
    fn residual_tolerance() -> Self {
        Self::epsilon().powf(Self::lit(2.0 / 3.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}
