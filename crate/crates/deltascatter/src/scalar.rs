//! Scalar abstraction and compensated (double-word) arithmetic.
//!
//! Everything in this crate is generic over [`Real`], a floating-point
//! scalar backed by `num-traits`. Concrete aliases for the `f64`
//! instantiation live at the crate root.

use std::fmt;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + fmt::Debug
        + fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into the working scalar type.
#[inline]
pub fn lit<R: Real>(v: f64) -> R {
    R::from_f64(v).expect("f64 literal must convert to the scalar type")
}

/// Error-free sum: `a + b = s + e` exactly.
#[inline]
fn two_sum<R: Real>(a: R, b: R) -> (R, R) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free sum assuming `|a| >= |b|`.
#[inline]
fn quick_two_sum<R: Real>(a: R, b: R) -> (R, R) {
    let s = a + b;
    (s, b - (s - a))
}

/// Error-free product via fused multiply-add: `a * b = p + e` exactly.
#[inline]
fn two_prod<R: Real>(a: R, b: R) -> (R, R) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Unevaluated double-word value `hi + lo` carrying roughly twice the
/// working precision. Only the handful of operations needed by the
/// alternating Bessel series are provided.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Dd<R: Real> {
    hi: R,
    lo: R,
}

impl<R: Real> Dd<R> {
    #[inline]
    pub fn from_scalar(v: R) -> Self {
        Dd { hi: v, lo: R::zero() }
    }

    #[inline]
    pub fn from_product(a: R, b: R) -> Self {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn hi(self) -> R {
        self.hi
    }

    #[inline]
    pub fn to_scalar(self) -> R {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul(self, other: Self) -> Self {
        let (p, mut e) = two_prod(self.hi, other.hi);
        e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div_scalar(self, x: R) -> Self {
        let q = self.hi / x;
        let (p, e) = two_prod(q, x);
        let r = ((self.hi - p) - e + self.lo) / x;
        let (hi, lo) = quick_two_sum(q, r);
        Dd { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Self {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sum_recovers_rounding_error() {
        let (s, e) = two_sum(1.0f64, 1e-20);
        assert_eq!(s, 1.0);
        assert_eq!(e, 1e-20);
    }

    #[test]
    fn dd_product_is_exact() {
        // (1 + 2^-30)^2 = 1 + 2^-29 + 2^-60: the cross term is below the
        // f64 ulp and survives only in the low word.
        let a = 1.0f64 + 2f64.powi(-30);
        let p = Dd::from_product(a, a);
        assert_eq!(p.hi, 1.0 + 2f64.powi(-29));
        assert_eq!(p.lo, 2f64.powi(-60));
    }

    #[test]
    fn dd_alternating_sum_beats_plain_f64() {
        // sum of (-1)^m q^m / m! for q = 30: huge cancellation.
        let q = 30.0f64;
        let mut term = Dd::from_scalar(1.0);
        let mut acc = Dd::from_scalar(1.0);
        for m in 1..200 {
            term = term.mul(Dd::from_scalar(q)).div_scalar(m as f64).neg();
            acc = acc.add(term);
        }
        let expected = (-q).exp();
        // max term ~ 30^30/30! ~ 8e11, so dd keeps ~1e-20 absolutely;
        // plain f64 accumulation would be wrong in the fourth digit.
        assert!((acc.to_scalar() - expected).abs() < 1e-18);
    }
}
