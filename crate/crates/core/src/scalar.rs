//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};
use rustfft::FftNum;

/// Floating point type the propagators are generic over: `f32` or `f64`.
///
/// `FftNum` brings in `num_traits::Signed`, whose `abs` collides with
/// `Float::abs`; call `Float::abs(x)` explicitly where needed.
pub trait Real:
    Float + FloatConst + FftNum + FromPrimitive + Default + Display + LowerExp + Sum + Debug
{
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("literal fits the scalar type")
    }

    /// Converts a small integer.
    fn int(n: i64) -> Self {
        <Self as FromPrimitive>::from_i64(n).expect("integer fits the scalar type")
    }

    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{i theta}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Complex exponential that only needs `T: Real`.
#[inline]
pub fn cexp<T: Real>(z: Complex<T>) -> Complex<T> {
    cis(z.im) * z.re.exp()
}

/// The imaginary unit.
#[inline]
pub fn imag<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// Real scalar promoted to a complex one.
#[inline]
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub fn im<T: Real>(x: T) -> Complex<T> {
    Complex::new(T::zero(), x)
}

/// Machine epsilon of `T`, as `f64`.
pub fn machine_eps<T: Real>() -> f64 {
    <T as Float>::epsilon().as_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cexp_matches_std() {
        let z = Complex::new(0.3_f64, -1.7);
        let a = cexp(z);
        let b = z.exp();
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn literals_in_f32() {
        assert_eq!(f32::lit(0.5), 0.5_f32);
        assert_eq!(f32::int(-3), -3.0_f32);
    }
}
