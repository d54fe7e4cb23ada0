//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating-point type the simulation is generic over.
///
/// Implemented for `f32` and `f64`. Default tolerances are tuned for `f64`.
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static {
    /// Converts an `f64` literal. Never fails for the implemented types.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over the scalar type.
pub type Cx<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Scalar>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn real<T: Scalar>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

/// `exp(i·phase)`.
#[inline]
pub(crate) fn cis<T: Scalar>(phase: T) -> Cx<T> {
    Complex::new(phase.cos(), phase.sin())
}

/// Gaussian integer lifted into the scalar field.
#[inline]
pub(crate) fn from_gaussian<T: Scalar>(z: Complex<i8>) -> Cx<T> {
    Complex::new(T::lit(z.re as f64), T::lit(z.im as f64))
}
