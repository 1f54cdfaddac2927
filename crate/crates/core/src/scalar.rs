//! Scalar abstraction: the numeric kernels are generic over the float type.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable by every kernel in this crate: f32 or f64.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Convert an f64 literal/parameter into the working scalar type.
#[inline]
pub fn cast<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 value representable in scalar type")
}

/// Round-trip a scalar to f64 for reports.
#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().expect("scalar representable as f64")
}

/// Left-to-right dot product.
#[inline]
pub fn dot<T: Scalar>(u: &[T], v: &[T]) -> T {
    debug_assert_eq!(u.len(), v.len());
    let mut acc = T::zero();
    for (&a, &b) in u.iter().zip(v.iter()) {
        acc += a * b;
    }
    acc
}

/// Euclidean norm with left-to-right accumulation.
#[inline]
pub fn norm_l2<T: Scalar>(u: &[T]) -> T {
    dot(u, u).sqrt()
}

/// Euclidean distance ‖u − v‖₂.
#[inline]
pub fn dist_l2<T: Scalar>(u: &[T], v: &[T]) -> T {
    debug_assert_eq!(u.len(), v.len());
    let mut acc = T::zero();
    for (&a, &b) in u.iter().zip(v.iter()) {
        let d = a - b;
        acc += d * d;
    }
    acc.sqrt()
}
