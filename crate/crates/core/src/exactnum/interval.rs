use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::scalar::{pow2, ExactScalar};

/// A closed interval with dyadic endpoints that certifiably contains a value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl CertifiedInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &ExactScalar) -> bool {
        let lo = ExactScalar::rational(self.lo.clone());
        let hi = ExactScalar::rational(self.hi.clone());
        &lo <= x && x <= &hi
    }

    pub fn contains_interval(&self, inner: &CertifiedInterval) -> bool {
        self.lo <= inner.lo && inner.hi <= self.hi
    }

    pub fn disjoint(&self, other: &CertifiedInterval) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }

    pub fn add(&self, other: &CertifiedInterval) -> Self {
        Self::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn shift(&self, by: &BigRational) -> Self {
        Self::new(&self.lo + by, &self.hi + by)
    }
}

/// Encloses `x` in an interval of width at most `2^-bits` with dyadic ends.
///
/// Exact dyadic values collapse to a point interval, so refinement is nested.
pub fn interval_refine(x: &ExactScalar, precision_bits: u32) -> CertifiedInterval {
    let bits = precision_bits.max(1);
    let scale = pow2(-(bits as i64));
    let fl = x.floor_scaled(bits);
    let lo = BigRational::from_integer(fl.clone()) * &scale;
    if ExactScalar::rational(lo.clone()) == *x {
        return CertifiedInterval::point(lo);
    }
    let hi = BigRational::from_integer(fl + BigInt::from(1)) * &scale;
    CertifiedInterval::new(lo, hi)
}

impl fmt::Display for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}/{}, {}/{}]", self.lo.numer(), self.lo.denom(), self.hi.numer(), self.hi.denom())
    }
}

impl Serialize for CertifiedInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CertifiedInterval", 2)?;
        st.serialize_field("lo", &ExactScalar::rational(self.lo.clone()).to_string())?;
        st.serialize_field("hi", &ExactScalar::rational(self.hi.clone()).to_string())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::scalar::rat;

    #[test]
    fn third_at_four_bits() {
        let x = ExactScalar::ratio(1, 3);
        let iv = interval_refine(&x, 4);
        assert!(iv.contains(&x));
        assert!(iv.width() <= rat(1, 16));
    }

    #[test]
    fn zero_is_a_point() {
        for bits in [1, 7, 64] {
            let iv = interval_refine(&ExactScalar::zero(), bits);
            assert_eq!(iv, CertifiedInterval::point(rat(0, 1)));
        }
    }

    #[test]
    fn sqrt2_minus_one_at_eight_bits() {
        // Continued-fraction oracle: convergents of sqrt2-1 alternate around it.
        // 169/408 < sqrt2-1 < 70/169 (from the Pell convergents 239/169, 577/408).
        let x = ExactScalar::sqrt2_minus_one();
        let iv = interval_refine(&x, 8);
        assert!(iv.contains(&x));
        assert!(iv.width() <= rat(1, 256));
        assert!(iv.lo <= rat(70, 169) && iv.hi >= rat(169, 408));
        // floor((sqrt2-1)*256) = 106
        assert_eq!(iv.lo, rat(106, 256));
    }

    #[test]
    fn refinement_is_nested() {
        let x = ExactScalar::sqrt2_minus_one();
        let mut prev = interval_refine(&x, 1);
        for bits in 2..80 {
            let next = interval_refine(&x, bits);
            assert!(prev.contains_interval(&next), "bits {bits}");
            prev = next;
        }
    }
}
