//! Floating point scalars accepted by the linear algebra and subspace layers.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Lossy for `f32`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Noise floor used where a fixed absolute threshold would be meaningless
    /// for low-precision types.
    fn tol_floor(x: f64, eps_mult: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(eps_mult))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
