//! Scalar traits shared by the numeric modules.
//!
//! Everything numeric in this crate is generic over a floating-point type
//! `T: Real` (`f32` or `f64`). Matrices are generic over an [`Entry`], which
//! is either a real scalar or a `Complex<T>`.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, Num, NumAssign, ToPrimitive};

/// floating point: f32 or f64
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Entry<Real = Self>
    + 'static
{
    /// Converts an `f64` literal (tolerances, Padé coefficients, ...).
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Element type of a dense matrix: a real scalar or a complex number over one.
pub trait Entry:
    Copy + PartialEq + Num + NumAssign + Neg<Output = Self> + Debug + Send + Sync + 'static
{
    type Real: Real;

    fn from_real(r: Self::Real) -> Self;
    fn conj(self) -> Self;
    /// Absolute value (modulus for complex entries).
    fn modulus(self) -> Self::Real;
    fn to_complex(self) -> Complex<Self::Real>;
    fn finite(self) -> bool;
}

macro_rules! real_entry {
    ($t:ty) => {
        impl Entry for $t {
            type Real = $t;

            #[inline]
            fn from_real(r: $t) -> Self {
                r
            }
            #[inline]
            fn conj(self) -> Self {
                self
            }
            #[inline]
            fn modulus(self) -> $t {
                self.abs()
            }
            #[inline]
            fn to_complex(self) -> Complex<$t> {
                Complex::new(self, 0.0)
            }
            #[inline]
            fn finite(self) -> bool {
                <$t>::is_finite(self)
            }
        }
    };
}

real_entry!(f32);
real_entry!(f64);

impl<T: Real> Entry for Complex<T> {
    type Real = T;

    #[inline]
    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }
    #[inline]
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    #[inline]
    fn modulus(self) -> T {
        self.norm()
    }
    #[inline]
    fn to_complex(self) -> Complex<T> {
        self
    }
    #[inline]
    fn finite(self) -> bool {
        Float::is_finite(self.re) && Float::is_finite(self.im)
    }
}

/// The imaginary unit over `T`.
#[inline]
pub fn imag_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// Lifts a real vector into a complex one.
pub fn complexify<T: Real>(x: &[T]) -> Vec<Complex<T>> {
    x.iter().map(|&v| Complex::new(v, T::zero())).collect()
}
