//! Scalar fields for cloud weights: `f64` and exact dyadic rationals.
//!
//! Cloud identities are coefficient-exact polynomial identities, so
//! clouds built from dyadic inputs (such as `½`) are evaluated without any
//! rounding by storing weights as [`Dyadic`] numbers `m · 2^e`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arithmetic needed by the cloud algebra.
pub trait Scalar: Clone + fmt::Debug + fmt::Display + PartialEq + Send + Sync + 'static {
    /// `true` when arithmetic is exact (comparisons use no tolerance).
    const EXACT: bool;
    /// Additive identity.
    fn zero() -> Self;
    /// Multiplicative identity.
    fn one() -> Self;
    /// `self + other`.
    fn add(&self, other: &Self) -> Self;
    /// `self − other`.
    fn sub(&self, other: &Self) -> Self;
    /// `self · other`.
    fn mul(&self, other: &Self) -> Self;
    /// `−self`.
    fn neg(&self) -> Self;
    /// `|self|`.
    fn abs(&self) -> Self;
    /// `true` for an exact zero.
    fn is_zero(&self) -> bool;
    /// Total order (exact for dyadics, IEEE total order for floats).
    fn compare(&self, other: &Self) -> Ordering;
    /// Nearest double.
    fn to_f64(&self) -> f64;
    /// Conversion from a finite double (exact for dyadics).
    fn from_f64(v: f64) -> Result<Self>;
    /// `2^{−k}`.
    fn pow2_neg(k: u32) -> Self;

    /// `self ≤ other` in the scalar order.
    fn le(&self, other: &Self) -> bool {
        self.compare(other) != Ordering::Greater
    }

    /// `self ≤ other` up to rounding: exact for exact scalars, and with
    /// relative tolerance `1e-12` (absolute floor `1e-12`) for floats.
    fn le_approx(&self, other: &Self) -> bool {
        if Self::EXACT {
            return self.le(other);
        }
        let (a, b) = (self.to_f64(), other.to_f64());
        a <= b + 1e-12 * a.abs().max(b.abs()).max(1.0)
    }

    /// Equality up to rounding (see [`Scalar::le_approx`]).
    fn eq_approx(&self, other: &Self) -> bool {
        self.le_approx(other) && other.le_approx(self)
    }

    /// `max(self, other)`.
    fn max_of(&self, other: &Self) -> Self {
        if self.compare(other) == Ordering::Less {
            other.clone()
        } else {
            self.clone()
        }
    }

    /// `true` when `self < 0`.
    fn is_negative(&self) -> bool {
        self.compare(&Self::zero()) == Ordering::Less
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn compare(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_f64(v: f64) -> Result<Self> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::contract(format!("non-finite weight {v}")))
        }
    }
    fn pow2_neg(k: u32) -> Self {
        (-(k as f64)).exp2()
    }
}

/// An exact dyadic rational `mantissa · 2^exponent`.
///
/// The representation is normalized: the mantissa is odd, or zero with
/// exponent zero, so structural equality is numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    /// `m · 2^e`, normalized.
    pub fn new(mantissa: impl Into<BigInt>, exponent: i64) -> Self {
        Self::normalized(mantissa.into(), exponent)
    }

    /// The integer `n`.
    pub fn from_int(n: i64) -> Self {
        Self::new(n, 0)
    }

    /// The mantissa (odd unless zero).
    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    /// The binary exponent.
    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    fn normalized(mut m: BigInt, mut e: i64) -> Self {
        if m.is_zero() {
            return Self { mantissa: m, exponent: 0 };
        }
        let tz = m.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            m >>= tz;
            e += tz as i64;
        }
        Self { mantissa: m, exponent: e }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i64) {
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << ((self.exponent - e) as usize);
        let b = &other.mantissa << ((other.exponent - e) as usize);
        (a, b, e)
    }
}

impl Scalar for Dyadic {
    const EXACT: bool = true;
    fn zero() -> Self {
        Self { mantissa: BigInt::zero(), exponent: 0 }
    }
    fn one() -> Self {
        Self { mantissa: BigInt::one(), exponent: 0 }
    }
    fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.aligned(other);
        Self::normalized(a + b, e)
    }
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        // Product of odd mantissas is odd: already normalized.
        Self { mantissa: &self.mantissa * &other.mantissa, exponent: self.exponent + other.exponent }
    }
    fn neg(&self) -> Self {
        Self { mantissa: -&self.mantissa, exponent: self.exponent }
    }
    fn abs(&self) -> Self {
        Self { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }
    fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }
    fn compare(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
    fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // Keep 64 significant bits, then scale in two steps to avoid
        // spurious overflow or underflow of the intermediate power.
        let bits = self.mantissa.bits() as i64;
        let (m, e) = if bits > 64 {
            let drop = bits - 64;
            (&self.mantissa >> (drop as usize), self.exponent + drop)
        } else {
            (self.mantissa.clone(), self.exponent)
        };
        let m = m.to_f64().unwrap_or(f64::NAN);
        let e = e.clamp(-4000, 4000) as i32;
        let half = e / 2;
        m * 2f64.powi(half) * 2f64.powi(e - half)
    }
    fn from_f64(v: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::contract(format!("non-finite weight {v}")));
        }
        if v == 0.0 {
            return Ok(Self::zero());
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & 0x000f_ffff_ffff_ffff;
        let (m, e) = if raw_exp == 0 {
            (frac as i64, -1074)
        } else {
            ((frac | 0x0010_0000_0000_0000) as i64, raw_exp - 1075)
        };
        Ok(Self::new(sign * m, e))
    }
    fn pow2_neg(k: u32) -> Self {
        Self { mantissa: BigInt::one(), exponent: -(k as i64) }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent >= 0 {
            write!(f, "{}", &self.mantissa << (self.exponent as usize))
        } else {
            write!(f, "{}/2^{}", self.mantissa, -self.exponent)
        }
    }
}
