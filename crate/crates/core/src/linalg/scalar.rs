//! Integer scalars used by the dense kernels.
//!
//! Every kernel is written once over [`Scalar`]. Arithmetic is checked: the
//! `i64` instance returns `None` on overflow, which makes the caller restart the
//! computation over `BigInt`. Results are therefore always exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub trait Scalar: Clone + PartialEq + Eq + std::fmt::Debug + Send + Sync {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn try_add(&self, o: &Self) -> Option<Self>;
    fn try_sub(&self, o: &Self) -> Option<Self>;
    fn try_mul(&self, o: &Self) -> Option<Self>;
    fn try_neg(&self) -> Option<Self>;
    /// Floor division.
    fn try_div_floor(&self, o: &Self) -> Option<Self>;
    fn is_neg(&self) -> bool;
    /// Total order on absolute values.
    fn abs_cmp(&self, o: &Self) -> std::cmp::Ordering;
    fn to_bigint(&self) -> BigInt;

    /// `self + a * b`.
    fn try_add_mul(&self, a: &Self, b: &Self) -> Option<Self> {
        self.try_add(&a.try_mul(b)?)
    }

    /// Remainder with the sign of the divisor (floor convention).
    fn try_mod_floor(&self, o: &Self) -> Option<Self> {
        self.try_sub(&self.try_div_floor(o)?.try_mul(o)?)
    }

    fn try_divides(&self, o: &Self) -> Option<bool> {
        if self.is_nil() {
            return Some(o.is_nil());
        }
        Some(o.try_mod_floor(self)?.is_nil())
    }
}

impl Scalar for i64 {
    fn nil() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn try_add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn try_sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn try_mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn try_neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn try_div_floor(&self, o: &Self) -> Option<Self> {
        if *o == 0 || (*self == i64::MIN && *o == -1) {
            return None;
        }
        Some(Integer::div_floor(self, o))
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn abs_cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.unsigned_abs().cmp(&o.unsigned_abs())
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn try_add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn try_sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn try_mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn try_neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn try_div_floor(&self, o: &Self) -> Option<Self> {
        if Zero::is_zero(o) {
            return None;
        }
        Some(Integer::div_floor(self, o))
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn abs_cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.magnitude().cmp(o.magnitude())
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

/// Extended gcd: `(g, x, y)` with `g = a x + b y`, `g >= 0`.
pub fn ext_gcd<T: Scalar>(a: &T, b: &T) -> Option<(T, T, T)> {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (T::unit(), T::nil());
    let (mut t0, mut t1) = (T::nil(), T::unit());
    while !r1.is_nil() {
        let q = r0.try_div_floor(&r1)?;
        let r2 = r0.try_sub(&q.try_mul(&r1)?)?;
        let s2 = s0.try_sub(&q.try_mul(&s1)?)?;
        let t2 = t0.try_sub(&q.try_mul(&t1)?)?;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_neg() {
        Some((r0.try_neg()?, s0.try_neg()?, t0.try_neg()?))
    } else {
        Some((r0, s0, t0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_gcd_identity() {
        for (a, b) in [(12i64, 18i64), (-4, 6), (0, 5), (7, 0), (0, 0), (-9, -6)] {
            let (g, x, y) = ext_gcd(&a, &b).unwrap();
            assert_eq!(g, a.gcd(&b));
            assert_eq!(a * x + b * y, g);
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert_eq!(Scalar::try_mul(&i64::MAX, &2), None);
        assert_eq!(Scalar::try_div_floor(&i64::MIN, &-1), None);
        assert_eq!(Scalar::try_div_floor(&-7i64, &2), Some(-4));
    }
}
