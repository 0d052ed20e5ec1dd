use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{pow2, CertifiedInterval, ExactScalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    ChebyshevPlane,
    CircleLength,
}

/// Symbolic position on the enlarged Denjoy circle: the rotation angle of the
/// point, plus the fiber and grid offset when the point sits on an inserted arc.
#[derive(Clone, Debug, PartialEq)]
pub struct CirclePos {
    pub theta: ExactScalar,
    pub fiber: Option<(i64, BigRational)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Coord {
    Plane { x: ExactScalar, y: ExactScalar },
    Circle(CirclePos),
}

impl Coord {
    pub fn plane(x: ExactScalar, y: ExactScalar) -> Self {
        Coord::Plane { x, y }
    }

    pub fn metric(&self) -> MetricKind {
        match self {
            Coord::Plane { .. } => MetricKind::ChebyshevPlane,
            Coord::Circle(_) => MetricKind::CircleLength,
        }
    }

    pub fn as_plane(&self) -> Option<(&ExactScalar, &ExactScalar)> {
        match self {
            Coord::Plane { x, y } => Some((x, y)),
            Coord::Circle(_) => None,
        }
    }

    /// Chebyshev norm for plane coordinates.
    pub fn norm(&self) -> Option<ExactScalar> {
        let (x, y) = self.as_plane()?;
        Some(std::cmp::max(x.abs(), y.abs()))
    }
}

/// A distance that is either known exactly or enclosed by certified bounds.
#[derive(Clone, Debug, PartialEq)]
pub enum Distance {
    Exact(ExactScalar),
    Bounded { lo: BigRational, hi: BigRational },
}

impl Distance {
    /// `Some(d ≤ delta)` when decidable, `None` when `delta` lies inside the bounds.
    pub fn within(&self, delta: &ExactScalar) -> Option<bool> {
        match self {
            Distance::Exact(d) => Some(d <= delta),
            Distance::Bounded { lo, hi } => {
                if &ExactScalar::rational(hi.clone()) <= delta {
                    Some(true)
                } else if &ExactScalar::rational(lo.clone()) > delta {
                    Some(false)
                } else {
                    None
                }
            }
        }
    }

    pub fn exact(&self) -> Option<&ExactScalar> {
        match self {
            Distance::Exact(d) => Some(d),
            Distance::Bounded { .. } => None,
        }
    }

    pub fn interval(&self, bits: u32) -> CertifiedInterval {
        match self {
            Distance::Exact(d) => {
                let iv = crate::exactnum::interval_refine(d, bits);
                CertifiedInterval::new(iv.lo, iv.hi)
            }
            Distance::Bounded { lo, hi } => CertifiedInterval::new(lo.clone(), hi.clone()),
        }
    }

    /// Upper bound as an exact scalar.
    pub fn upper(&self) -> ExactScalar {
        match self {
            Distance::Exact(d) => d.clone(),
            Distance::Bounded { hi, .. } => ExactScalar::rational(hi.clone()),
        }
    }
}

pub fn plane_distance(a: &Coord, b: &Coord) -> Result<ExactScalar> {
    match (a, b) {
        (Coord::Plane { x: ax, y: ay }, Coord::Plane { x: bx, y: by }) => {
            Ok(std::cmp::max((ax - bx).abs(), (ay - by).abs()))
        }
        _ => Err(Error::MixedCoordinates(format!("{:?}", a.metric()), format!("{:?}", b.metric()))),
    }
}

/// Fixed-point scale used by the fast interval path.
pub const FAST_BITS: u32 = 96;

/// Closed interval `[lo, hi]·2^-FAST_BITS` with integer ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fix {
    pub lo: i128,
    pub hi: i128,
}

impl std::ops::Sub for Fix {
    type Output = Fix;

    fn sub(self, o: Fix) -> Fix {
        Fix { lo: self.lo - o.hi, hi: self.hi - o.lo }
    }
}

impl Fix {
    pub fn exact_or_ulp(x: &ExactScalar) -> Option<Fix> {
        let fl = x.floor_scaled(FAST_BITS);
        let lo = fl.to_i128()?;
        let exact = ExactScalar::rational(BigRational::new(fl, BigInt::from(1)) * pow2(-(FAST_BITS as i64))) == *x;
        Some(Fix { lo, hi: if exact { lo } else { lo.checked_add(1)? } })
    }

    pub fn from_interval(iv: &CertifiedInterval) -> Option<Fix> {
        let scale = pow2(FAST_BITS as i64);
        let lo = (&iv.lo * &scale).floor().to_integer().to_i128()?;
        let hi = (&iv.hi * &scale).ceil().to_integer().to_i128()?;
        Some(Fix { lo, hi })
    }

    pub fn abs(self) -> Fix {
        if self.lo >= 0 {
            self
        } else if self.hi <= 0 {
            Fix { lo: -self.hi, hi: -self.lo }
        } else {
            Fix { lo: 0, hi: self.hi.max(-self.lo) }
        }
    }

    pub fn max(self, o: Fix) -> Fix {
        Fix { lo: self.lo.max(o.lo), hi: self.hi.max(o.hi) }
    }

    pub fn min(self, o: Fix) -> Fix {
        Fix { lo: self.lo.min(o.lo), hi: self.hi.min(o.hi) }
    }

    /// Decides `self ≤ delta` when the interval does not straddle it.
    pub fn le(self, delta: Fix) -> Option<bool> {
        if self.hi <= delta.lo {
            Some(true)
        } else if self.lo > delta.hi {
            Some(false)
        } else {
            None
        }
    }
}

/// Coordinates of a point in the fast fixed-point representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FastCoord {
    Plane {
        x: Fix,
        y: Fix,
    },
    /// Position on a circle of the given fixed-point circumference.
    Circle {
        pos: Fix,
        circumference: i128,
    },
}

impl FastCoord {
    pub fn from_coord_plane(c: &Coord) -> Option<FastCoord> {
        let (x, y) = c.as_plane()?;
        Some(FastCoord::Plane { x: Fix::exact_or_ulp(x)?, y: Fix::exact_or_ulp(y)? })
    }

    pub fn distance(&self, o: &FastCoord) -> Option<Fix> {
        match (self, o) {
            (FastCoord::Plane { x, y }, FastCoord::Plane { x: ox, y: oy }) => {
                Some((*x - *ox).abs().max((*y - *oy).abs()))
            }
            (FastCoord::Circle { pos, circumference }, FastCoord::Circle { pos: opos, .. }) => {
                let d = (*pos - *opos).abs();
                let other = Fix { lo: circumference - d.hi, hi: circumference - d.lo };
                Some(d.min(other))
            }
            _ => None,
        }
    }
}

/// Circle distance `min(|D|, C - |D|)` from an enclosure `[lo, hi]` of the
/// signed displacement `D`.
pub fn circle_distance_bounds(
    lo: &BigRational,
    hi: &BigRational,
    circumference: &BigRational,
) -> (BigRational, BigRational) {
    let (alo, ahi) = if lo >= &BigRational::zero() {
        (lo.clone(), hi.clone())
    } else if hi <= &BigRational::zero() {
        (-hi.clone(), -lo.clone())
    } else {
        (BigRational::zero(), std::cmp::max(-lo.clone(), hi.clone()))
    };
    let wrap_lo = circumference - &ahi;
    let wrap_hi = circumference - &alo;
    let lo = std::cmp::min(alo, wrap_lo);
    let hi = std::cmp::min(ahi, wrap_hi);
    (lo.max(BigRational::zero()), hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    #[test]
    fn chebyshev_examples() {
        let o = Coord::plane(ExactScalar::zero(), ExactScalar::zero());
        let p = Coord::plane(ExactScalar::one(), ExactScalar::one());
        assert_eq!(plane_distance(&o, &p).unwrap(), ExactScalar::one());
        assert_eq!(plane_distance(&p, &p).unwrap(), ExactScalar::zero());
    }

    #[test]
    fn bounded_within() {
        let d = Distance::Bounded { lo: rat(1, 10), hi: rat(1, 5) };
        assert_eq!(d.within(&ExactScalar::ratio(1, 4)), Some(true));
        assert_eq!(d.within(&ExactScalar::ratio(1, 20)), Some(false));
        assert_eq!(d.within(&ExactScalar::ratio(1, 8)), None);
    }

    #[test]
    fn fast_path_matches_exact() {
        let a = Coord::plane(ExactScalar::ratio(1, 3), ExactScalar::ratio(-2, 7));
        let b = Coord::plane(ExactScalar::ratio(1, 4), ExactScalar::sqrt2_minus_one());
        let exact = plane_distance(&a, &b).unwrap();
        let fa = FastCoord::from_coord_plane(&a).unwrap();
        let fb = FastCoord::from_coord_plane(&b).unwrap();
        let fd = fa.distance(&fb).unwrap();
        let scale = pow2(FAST_BITS as i64);
        let lo = ExactScalar::rational(BigRational::from_integer(fd.lo.into()) / &scale);
        let hi = ExactScalar::rational(BigRational::from_integer(fd.hi.into()) / &scale);
        assert!(lo <= exact && exact <= hi);
    }

    #[test]
    fn circle_bounds_wrap() {
        let (lo, hi) = circle_distance_bounds(&rat(19, 10), &rat(19, 10), &rat(2, 1));
        assert_eq!((lo, hi), (rat(1, 10), rat(1, 10)));
    }
}
