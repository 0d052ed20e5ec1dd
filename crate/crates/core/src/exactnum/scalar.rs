//! Exact scalars in the ring Q(√2): values `a + b·√2` with rational `a`, `b`.
//!
//! Rationals are the `b = 0` case. Every comparison is decided algebraically;
//! no floating point is ever consulted.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A rational or quadratic-irrational number `a + b·√2`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    a: BigRational,
    b: BigRational,
}

/// Builds a rational from two machine integers. Panics on a zero denominator.
pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// `2^e` for any integer `e`, as an exact rational.
pub fn pow2(e: i64) -> BigRational {
    let mag = BigInt::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

fn floor_rat(x: &BigRational) -> BigInt {
    x.numer().div_floor(x.denom())
}

impl ExactScalar {
    pub fn zero() -> Self {
        Self::rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn rational(a: BigRational) -> Self {
        Self { a, b: BigRational::zero() }
    }

    pub fn quad(a: BigRational, b: BigRational) -> Self {
        Self { a, b }
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Self::rational(rat(p, q))
    }

    pub fn integer(n: i64) -> Self {
        Self::ratio(n, 1)
    }

    pub fn sqrt2() -> Self {
        Self::quad(BigRational::zero(), BigRational::one())
    }

    /// The rotation number used by the Denjoy construction, √2 − 1.
    pub fn sqrt2_minus_one() -> Self {
        Self::quad(-BigRational::one(), BigRational::one())
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn sqrt2_part(&self) -> &BigRational {
        &self.b
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign of `a + b√2`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            // opposite signs: compare a² against 2b²
            (sa, _) => {
                let a2 = &self.a * &self.a;
                let b2 = &self.b * &self.b * BigRational::from_integer(BigInt::from(2));
                match a2.cmp(&b2) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse via the conjugate. `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let norm = &self.a * &self.a - &self.b * &self.b * two;
        Some(Self::quad(&self.a / &norm, -(&self.b / &norm)))
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        rhs.recip().map(|r| self * &r)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::quad(&self.a * k, &self.b * k)
    }

    /// `floor(self)` exactly.
    pub fn floor(&self) -> BigInt {
        self.floor_scaled(0)
    }

    /// `floor(self · 2^bits)` exactly.
    pub fn floor_scaled(&self, bits: u32) -> BigInt {
        let scale = pow2(bits as i64);
        let v = self.scale(&scale);
        if v.is_rational() {
            return floor_rat(&v.a);
        }
        // seed from integer square roots, then correct by exact comparisons
        let b = &v.b;
        let two_b2 = b * b * BigRational::from_integer(BigInt::from(2));
        let root = floor_rat(&two_b2).sqrt();
        let mut guess = floor_rat(&v.a) + if b.is_negative() { -root - 1 } else { root };
        loop {
            let g = Self::rational(BigRational::from_integer(guess.clone()));
            if (&v - &g).signum() == Ordering::Less {
                guess -= 1;
                continue;
            }
            let g1 = Self::rational(BigRational::from_integer(&guess + 1));
            if (&v - &g1).signum() != Ordering::Less {
                guess += 1;
                continue;
            }
            return guess;
        }
    }

    /// `self mod 1`, in `[0, 1)`.
    pub fn fract(&self) -> Self {
        let f = self.floor();
        self - &Self::rational(BigRational::from_integer(f))
    }

    /// Coarse decimal rendering for human-facing output only.
    pub fn to_f64_lossy(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }
}

impl Default for ExactScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<BigRational> for ExactScalar {
    fn from(a: BigRational) -> Self {
        Self::rational(a)
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        Self::integer(n)
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.is_rational() && other.is_rational() {
            return self.a.cmp(&other.a);
        }
        (self - other).signum()
    }
}

impl<'a> Add<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::quad(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl<'a> Sub<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::quad(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl<'a> Mul<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        let two = BigRational::from_integer(BigInt::from(2));
        ExactScalar::quad(&self.a * &rhs.a + &self.b * &rhs.b * two, &self.a * &rhs.b + &self.b * &rhs.a)
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl Sub for ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl Mul for ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> Self {
        ExactScalar::quad(-self.a, -self.b)
    }
}

fn fmt_rat(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Text encoding: `p/q` for rationals, `a/b+c/d*sqrt2` for quadratic values.
impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", fmt_rat(&self.a))
        } else if self.b.is_negative() {
            write!(f, "{}-{}*sqrt2", fmt_rat(&self.a), fmt_rat(&-self.b.clone()))
        } else {
            write!(f, "{}+{}*sqrt2", fmt_rat(&self.a), fmt_rat(&self.b))
        }
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rat(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational literal `{s}`"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p = BigInt::from_str(p).map_err(|_| bad())?;
    let q = BigInt::from_str(q).map_err(|_| bad())?;
    if q.sign() == Sign::NoSign {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

impl FromStr for ExactScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(body) = s.strip_suffix("*sqrt2") else {
            return parse_rat(s).map(Self::rational);
        };
        // split at the sign between the rational part and the sqrt2 coefficient
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last()
            .ok_or_else(|| Error::Parse(format!("bad quadratic literal `{s}`")))?;
        let a = parse_rat(&body[..split])?;
        let coeff = parse_rat(&body[split + 1..])?;
        let b = if body[split..].starts_with('-') { -coeff } else { coeff };
        Ok(Self::quad(a, b))
    }
}

impl serde::Serialize for ExactScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for ExactScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: (i64, i64), b: (i64, i64)) -> ExactScalar {
        ExactScalar::quad(rat(a.0, a.1), rat(b.0, b.1))
    }

    #[test]
    fn sign_of_quadratic_values() {
        assert_eq!(ExactScalar::sqrt2_minus_one().signum(), Ordering::Greater);
        // 3/2 - sqrt2 > 0, 7/5 - sqrt2 < 0
        assert_eq!(q((3, 2), (-1, 1)).signum(), Ordering::Greater);
        assert_eq!(q((7, 5), (-1, 1)).signum(), Ordering::Less);
        assert_eq!(q((0, 1), (0, 1)).signum(), Ordering::Equal);
    }

    #[test]
    fn floor_and_fract() {
        assert_eq!(ExactScalar::sqrt2().floor(), BigInt::from(1));
        assert_eq!((-ExactScalar::sqrt2()).floor(), BigInt::from(-2));
        // floor(sqrt2 * 2^10) = 1448
        assert_eq!(ExactScalar::sqrt2().floor_scaled(10), BigInt::from(1448));
        let f = ExactScalar::integer(5).fract();
        assert!(f.is_zero());
        let x = (&ExactScalar::integer(7) * &ExactScalar::sqrt2_minus_one()).fract();
        assert!(x >= ExactScalar::zero() && x < ExactScalar::one());
    }

    #[test]
    fn reciprocal_round_trips() {
        let x = q((3, 7), (-2, 5));
        let r = x.recip().unwrap();
        assert_eq!(&x * &r, ExactScalar::one());
        assert!(ExactScalar::zero().recip().is_none());
    }

    #[test]
    fn text_encoding() {
        let x = q((-1, 1), (1, 1));
        assert_eq!(x.to_string(), "-1/1+1/1*sqrt2");
        assert_eq!("-1/1+1/1*sqrt2".parse::<ExactScalar>().unwrap(), x);
        assert_eq!("3/4-1/2*sqrt2".parse::<ExactScalar>().unwrap(), q((3, 4), (-1, 2)));
        assert_eq!("5/10".parse::<ExactScalar>().unwrap(), ExactScalar::ratio(1, 2));
        assert!("1/0".parse::<ExactScalar>().is_err());
    }
}
