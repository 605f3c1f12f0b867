//! Arbitrary-precision rational numbers.
//!
//! [`Rat`] is a thin wrapper over `num_rational::BigRational` that pins the
//! invariants used throughout the crate: reduced fractions with a positive
//! denominator, serialized as a `[numerator, denominator]` string pair.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

/// Exact rational number. `gcd(num, den) = 1` and `den > 0` always hold;
/// `num_rational` maintains both on every operation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new<T: Into<BigInt>, U: Into<BigInt>>(num: T, den: U) -> Self {
        let d: BigInt = den.into();
        assert!(!d.is_zero(), "zero denominator");
        Rat(BigRational::new(num.into(), d))
    }

    pub fn from_int<T: Into<BigInt>>(n: T) -> Self {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "division by zero");
        Rat(self.0.recip())
    }

    pub fn pow(&self, exp: i64) -> Self {
        if exp == 0 {
            return Rat::one();
        }
        let base = if exp < 0 { self.inv() } else { self.clone() };
        let mut acc = Rat::one();
        let mut b = base;
        let mut e = exp.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc *= b.clone();
            }
            b = b.clone() * b;
            e >>= 1;
        }
        acc
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    /// p-adic valuation; `None` for zero (valuation +infinity).
    pub fn val_p(&self, p: u64) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let p = BigInt::from(p);
        let mut v: i64 = 0;
        let mut n = self.numer().clone();
        while (&n % &p).is_zero() {
            n /= &p;
            v += 1;
        }
        let mut d = self.denom().clone();
        while (&d % &p).is_zero() {
            d /= &p;
            v -= 1;
        }
        Some(v)
    }

    /// Reduce modulo `pm` (an integer modulus the denominator must be
    /// coprime to). Returns `None` when the denominator is not invertible.
    pub fn mod_int(&self, pm: &BigInt) -> Option<BigInt> {
        let d = self.denom().mod_floor(pm);
        let e = d.extended_gcd(pm);
        if !e.gcd.is_one() {
            return None;
        }
        let inv = e.x.mod_floor(pm);
        Some((self.numer() * inv).mod_floor(pm))
    }

    pub fn binomial(n: i64, k: u64) -> Rat {
        let mut acc = Rat::one();
        for j in 0..k {
            acc *= Rat::from_int(n - j as i64);
            acc /= Rat::from_int(j as i64 + 1);
        }
        acc
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'b Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        Rat(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Rat> for Rat {
    type Output = Rat;
    fn div(self, rhs: &'a Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        Rat(self.0 / &rhs.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl<'a> Neg for &'a Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0.clone())
    }
}

impl AddAssign for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Rat {
    fn sub_assign(&mut self, rhs: Rat) {
        self.0 -= rhs.0;
    }
}

impl MulAssign for Rat {
    fn mul_assign(&mut self, rhs: Rat) {
        self.0 *= rhs.0;
    }
}

impl Div<Rat> for &Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        self.clone() / rhs
    }
}

impl std::ops::DivAssign for Rat {
    fn div_assign(&mut self, rhs: Rat) {
        assert!(!rhs.is_zero(), "division by zero");
        self.0 /= rhs.0;
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.numer().to_string(), self.denom().to_string()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (n, den): (String, String) = Deserialize::deserialize(d)?;
        let n = BigInt::from_str(&n).map_err(D::Error::custom)?;
        let den = BigInt::from_str(&den).map_err(D::Error::custom)?;
        if den.sign() != Sign::Plus {
            return Err(D::Error::custom("denominator must be positive"));
        }
        Ok(Rat::new(n, den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_and_sign() {
        let r = Rat::new(4, -6);
        assert_eq!(r, Rat::new(-2, 3));
        assert_eq!(r.denom(), &BigInt::from(3));
    }

    #[test]
    fn val_p() {
        assert_eq!(Rat::new(50, 3).val_p(5), Some(2));
        assert_eq!(Rat::new(3, 25).val_p(5), Some(-2));
        assert_eq!(Rat::zero().val_p(5), None);
    }

    #[test]
    fn mod_int() {
        let pm = BigInt::from(125);
        assert_eq!(Rat::new(1, 3).mod_int(&pm), Some(BigInt::from(42)));
        assert_eq!(Rat::new(1, 5).mod_int(&pm), None);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(Rat::binomial(5, 2), Rat::from_int(10));
        assert_eq!(Rat::binomial(-1, 3), Rat::from_int(-1));
    }
}
