//! The two arithmetic modes used throughout the crate.
//!
//! Certificates run over [`Q`] (arbitrary-precision rationals) and are exact.
//! Dynamics run over `f64`. Most linear-algebra routines are generic over
//! [`Scalar`] so the same code path serves both.

use core::fmt::Debug;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Q = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    const EXACT: bool;

    fn from_i64(n: i64) -> Self;
    fn from_q(q: &Q) -> Self;

    /// `None` on division by zero.
    fn checked_div(&self, rhs: &Self) -> Option<Self>;

    /// Whether `self` should be treated as zero relative to `scale`
    /// (the magnitude of the data it was derived from).
    fn negligible(&self, scale: f64) -> bool;

    /// Magnitude used for pivot selection.
    fn magnitude(&self) -> f64;

    fn is_integral(&self) -> bool;

    fn half() -> Self {
        Self::one().checked_div(&Self::from_i64(2)).unwrap()
    }
}

impl Scalar for Q {
    const EXACT: bool = true;

    fn from_i64(n: i64) -> Self {
        Q::from_integer(BigInt::from(n))
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            None
        } else {
            Some(self / rhs)
        }
    }
    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
    fn magnitude(&self) -> f64 {
        // Exact pivoting only needs "nonzero"; prefer the first one found.
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }
    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

/// Relative threshold under which a float is treated as zero during elimination.
pub const FLOAT_ELIM_EPS: f64 = 1e-11;

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_q(q: &Q) -> Self {
        q_to_f64(q)
    }
    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if *rhs == 0.0 {
            None
        } else {
            Some(self / rhs)
        }
    }
    fn negligible(&self, scale: f64) -> bool {
        libm::fabs(*self) <= FLOAT_ELIM_EPS * scale.max(f64::MIN_POSITIVE)
    }
    fn magnitude(&self) -> f64 {
        libm::fabs(*self)
    }
    fn is_integral(&self) -> bool {
        libm::fabs(self - libm::round(*self)) <= 1e-9
    }
}

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_to_f64(q: &Q) -> f64 {
    if let Some(x) = q.to_f64() {
        return x;
    }
    // Very large numerators/denominators: scale both down first.
    let n = q.numer();
    let d = q.denom();
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let n = (n >> shift as usize).to_f64().unwrap_or(0.0);
    let d = (d >> shift as usize).to_f64().unwrap_or(1.0);
    n / d
}

/// Exact rational value of a finite double.
pub fn q_from_f64(x: f64) -> Option<Q> {
    Q::from_float(x)
}

/// Floor of the square root of a nonnegative rational.
pub fn floor_sqrt(q: &Q) -> BigInt {
    assert!(!q.is_negative(), "floor_sqrt of a negative rational");
    // floor(sqrt(p/d)) = floor(isqrt(p*d) / d)
    let p = q.numer();
    let d = q.denom();
    let s = (p * d).sqrt();
    s.div_floor(d)
}

/// Exact square root of a rational, if it is the square of a rational.
pub fn exact_sqrt(q: &Q) -> Option<Q> {
    if q.is_negative() {
        return None;
    }
    let p = q.numer();
    let d = q.denom();
    let sp = p.sqrt();
    let sd = d.sqrt();
    if &(&sp * &sp) == p && &(&sd * &sd) == d {
        Some(Q::new(sp, sd))
    } else {
        None
    }
}

/// The rational with the smallest denominator (and then smallest numerator)
/// in the closed interval `[lo, hi]`.
///
/// Continued-fraction descent of the Stern–Brocot tree.
pub fn simplest_rational_between(lo: &Q, hi: &Q) -> Q {
    assert!(lo <= hi, "empty interval");
    if !lo.is_positive() && !hi.is_negative() {
        return Q::zero();
    }
    if hi.is_negative() {
        return -simplest_rational_between(&-hi.clone(), &-lo.clone());
    }
    simplest_positive(lo, hi)
}

fn simplest_positive(lo: &Q, hi: &Q) -> Q {
    // 0 < lo <= hi
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if &fl + Q::one() <= *hi {
        return fl + Q::one();
    }
    // lo and hi share the integer part a; recurse on reciprocals of fractional parts.
    let a = fl;
    let lo_f = lo - &a;
    let hi_f = hi - &a;
    let inner = simplest_positive(&hi_f.recip(), &lo_f.recip());
    a + inner.recip()
}

/// Simplest rational within `tol` of `x` (tol > 0).
pub fn simplest_rational_near(x: f64, tol: f64) -> Q {
    let lo = q_from_f64(x - tol).expect("finite");
    let hi = q_from_f64(x + tol).expect("finite");
    simplest_rational_between(&lo, &hi)
}

/// Least common multiple of the denominators of `qs` (1 for an empty list).
pub fn lcm_denominators<'a>(qs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    qs.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn norm_sq<S: Scalar>(a: &[S]) -> S {
    dot(a, a)
}

pub fn add_vec<S: Scalar>(a: &[S], b: &[S]) -> alloc::vec::Vec<S> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() + y.clone())
        .collect()
}

pub fn sub_vec<S: Scalar>(a: &[S], b: &[S]) -> alloc::vec::Vec<S> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() - y.clone())
        .collect()
}

pub fn scale_vec<S: Scalar>(s: &S, a: &[S]) -> alloc::vec::Vec<S> {
    a.iter().map(|x| s.clone() * x.clone()).collect()
}

pub fn to_f64_vec(a: &[Q]) -> alloc::vec::Vec<f64> {
    a.iter().map(q_to_f64).collect()
}

pub fn to_q_vec(a: &[i64]) -> alloc::vec::Vec<Q> {
    a.iter().map(|&n| q_int(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplest_rational_examples() {
        assert_eq!(
            simplest_rational_between(&q_frac(3, 10), &q_frac(4, 10)),
            q_frac(1, 3)
        );
        assert_eq!(
            simplest_rational_between(&q_frac(-1, 2), &q_frac(1, 2)),
            q_int(0)
        );
        assert_eq!(
            simplest_rational_between(&q_frac(7, 2), &q_frac(7, 2)),
            q_frac(7, 2)
        );
        assert_eq!(
            simplest_rational_between(&q_frac(-4, 10), &q_frac(-3, 10)),
            q_frac(-1, 3)
        );
        assert_eq!(
            simplest_rational_near(0.33333333333333337, 1e-9),
            q_frac(1, 3)
        );
        assert_eq!(simplest_rational_near(2.49, 0.2), q_frac(5, 2));
    }

    #[test]
    fn simplest_rational_has_minimal_denominator() {
        // brute force over denominators
        for (lo, hi) in [
            (0.31, 0.315),
            (1.41, 1.415),
            (2.718, 2.7183),
            (0.001, 0.0011),
        ] {
            let q = simplest_rational_between(&q_from_f64(lo).unwrap(), &q_from_f64(hi).unwrap());
            let d = q.denom().to_i64().unwrap();
            for den in 1..d {
                let n = libm::ceil(lo * den as f64) as i64;
                assert!(
                    (n as f64) / (den as f64) > hi,
                    "denominator {den} admits {n}/{den}"
                );
            }
        }
    }

    #[test]
    fn sqrt_helpers() {
        assert_eq!(floor_sqrt(&q_frac(100, 37)), BigInt::from(1));
        assert_eq!(floor_sqrt(&q_int(100)), BigInt::from(10));
        assert_eq!(floor_sqrt(&q_frac(1, 4)), BigInt::from(0));
        assert_eq!(exact_sqrt(&q_frac(9, 25)), Some(q_frac(3, 5)));
        assert_eq!(exact_sqrt(&q_frac(2, 1)), None);
    }

    #[test]
    fn float_round_trip() {
        let q = q_from_f64(0.1).unwrap();
        assert_eq!(q_to_f64(&q), 0.1);
        assert!(f64::from_q(&q_frac(1, 3)) - 1.0 / 3.0 == 0.0);
    }
}
