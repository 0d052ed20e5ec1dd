//! The modified Denjoy system: an irrational rotation whose base orbit is
//! blown up into inserted arcs, each arc then replaced by an `n`-point fiber.
//!
//! Angles live on the unit circle; the enlarged circle `Y` has circumference
//! 2 because the inserted arcs have total length 1.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{interval_refine, pow2, rat, CertifiedInterval, ExactScalar};
use crate::space::coord::{circle_distance_bounds, CirclePos, Coord, Distance, FastCoord, Fix, MetricKind, FAST_BITS};
use crate::space::{DynSystem, IndexBounds, Point};

/// Largest arc index kept in the angle table.
pub const MAX_K: u32 = 128;
/// Arc index used for the cached fast-path positions.
const FAST_K: u32 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// `a_k`, the start of the fiber at an orbit angle.
    Minus,
    /// `b_k`, the end of the fiber.
    Plus,
    Interior,
}

/// `l(I_k) = (1/3)·2^{-|k|}`.
pub fn arc_length(k: i64) -> BigRational {
    pow2(-(k.unsigned_abs() as i64)) / BigRational::from_integer(BigInt::from(3))
}

/// `Σ_{|k|>K} l(I_k) = (1/3)·2^{-K+1}`.
pub fn tail_sum(k: u32) -> BigRational {
    pow2(1 - k as i64) / BigRational::from_integer(BigInt::from(3))
}

/// Diameters `diam(T^m I_k) = l(I_{k+m})` for `m` in `lo..=hi`.
pub fn arc_diameter_profile(k: i64, lo: i64, hi: i64) -> Vec<(i64, BigRational)> {
    (lo..=hi).map(|m| (m, arc_length(k + m))).collect()
}

pub struct DenjoySystem {
    n: u32,
    alpha: ExactScalar,
    /// `θ_k = frac(k·α)` for `|k| ≤ MAX_K`, indexed by `k + MAX_K`.
    thetas: Vec<ExactScalar>,
    /// Orbit angles with `|k| ≤ FAST_K`, sorted, with prefix sums of arc lengths.
    sorted: Vec<(ExactScalar, i64)>,
    prefix: Vec<BigRational>,
}

pub fn build_denjoy(n: u32) -> Result<DenjoySystem> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("fiber size n must be at least 2, got {n}")));
    }
    let alpha = ExactScalar::sqrt2_minus_one();
    let m = MAX_K as i64;
    let thetas: Vec<ExactScalar> = (-m..=m).map(|k| (&ExactScalar::integer(k) * &alpha).fract()).collect();
    let mut sorted: Vec<(ExactScalar, i64)> =
        (-(FAST_K as i64)..=FAST_K as i64).map(|k| (thetas[(k + m) as usize].clone(), k)).collect();
    sorted.sort();
    let mut prefix = vec![BigRational::zero()];
    for (_, k) in &sorted {
        let next = prefix.last().expect("nonempty") + arc_length(*k);
        prefix.push(next);
    }
    Ok(DenjoySystem { n, alpha, thetas, sorted, prefix })
}

impl DenjoySystem {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alpha(&self) -> &ExactScalar {
        &self.alpha
    }

    /// `θ_k = T_α^k(0)`.
    pub fn theta(&self, k: i64) -> ExactScalar {
        if k.unsigned_abs() <= MAX_K as u64 {
            self.thetas[(k + MAX_K as i64) as usize].clone()
        } else {
            (&ExactScalar::integer(k) * &self.alpha).fract()
        }
    }

    /// The base-orbit index of `theta`, if it is an orbit angle.
    pub fn orbit_index(&self, theta: &ExactScalar) -> Option<i64> {
        use num_traits::ToPrimitive;
        if !theta.rational_part().is_integer() || !theta.sqrt2_part().is_integer() {
            return None;
        }
        let k = theta.sqrt2_part().to_integer().to_i64()?;
        (self.theta(k) == *theta).then_some(k)
    }

    /// A minimal-set point given by its angle; orbit angles resolve to the
    /// fiber endpoints `a_k` / `b_k`.
    pub fn cantor_point(&self, theta: ExactScalar, side: Side) -> Result<Point> {
        let theta = theta.fract();
        match self.orbit_index(&theta) {
            Some(k) => match side {
                Side::Minus => Ok(Point::Arc { k, i: 0 }),
                Side::Plus => Ok(Point::Arc { k, i: self.n - 1 }),
                Side::Interior => Err(Error::InvalidArgument(format!("angle {theta} is on the base orbit"))),
            },
            None => Ok(Point::Cantor { theta }),
        }
    }

    /// Cantor samples `frac(s·α + 1/2)`; the rational part keeps them off the base orbit.
    pub fn cantor_samples(&self, count: u32) -> Vec<Point> {
        (0..count as i64)
            .map(|s| {
                let theta = (&ExactScalar::integer(s) * &self.alpha + ExactScalar::ratio(1, 2)).fract();
                Point::Cantor { theta }
            })
            .collect()
    }

    fn circle_pos(&self, p: &Point) -> Result<CirclePos> {
        match p {
            Point::Arc { k, i } if *i < self.n => {
                let off = arc_length(*k) * rat(*i as i64, self.n as i64 - 1);
                Ok(CirclePos { theta: self.theta(*k), fiber: Some((*k, off)) })
            }
            Point::Cantor { theta } if self.contains(p) => Ok(CirclePos { theta: theta.clone(), fiber: None }),
            _ => Err(Error::UnknownPoint(p.to_string())),
        }
    }

    /// `Σ_{|j|≤K, θ_j<θ, j≠own} l(I_j)`.
    fn partial_sum(&self, theta: &ExactScalar, own: Option<i64>, k_max: u32) -> BigRational {
        let mut s = BigRational::zero();
        for j in -(k_max as i64)..=k_max as i64 {
            if Some(j) != own && self.theta(j) < *theta {
                s += arc_length(j);
            }
        }
        s
    }

    fn fast_partial_sum(&self, theta: &ExactScalar) -> BigRational {
        let idx = self.sorted.partition_point(|(t, _)| t < theta);
        self.prefix[idx].clone()
    }

    /// Truncated position `θ + S_K(θ) + offset` and the certified tail width.
    fn position_parts(&self, p: &Point, k_max: u32) -> Result<(ExactScalar, BigRational)> {
        let cp = self.circle_pos(p)?;
        let own = cp.fiber.as_ref().map(|f| f.0);
        // the own arc never counts: θ_k < θ_k is false
        let mut sum =
            if k_max == FAST_K { self.fast_partial_sum(&cp.theta) } else { self.partial_sum(&cp.theta, own, k_max) };
        let off = cp.fiber.map(|(_, o)| o).unwrap_or_else(BigRational::zero);
        sum += off;
        Ok((&cp.theta + &ExactScalar::rational(sum), tail_sum(k_max)))
    }

    /// Certified position of `p` on `Y` with width at most `2^-bits`.
    pub fn position(&self, p: &Point, precision_bits: u32) -> Result<CertifiedInterval> {
        let bits = precision_bits.max(1);
        let k = bits + 1;
        if k > MAX_K {
            let (base, tail) = self.position_parts(p, MAX_K)?;
            let iv = interval_refine(&base, MAX_K);
            let width = iv.width() + tail;
            return Err(Error::PrecisionUnreachable {
                requested: bits,
                max_k: MAX_K,
                achieved: ExactScalar::rational(width).to_string(),
            });
        }
        let (base, tail) = self.position_parts(p, k)?;
        let iv = interval_refine(&base, bits + 2);
        Ok(CertifiedInterval::new(iv.lo, iv.hi + tail))
    }

    /// Signed displacement `pos(a) − pos(b)` enclosed using the shared truncation.
    fn displacement(&self, a: &Point, b: &Point, k_max: u32, bits: u32) -> Result<(BigRational, BigRational)> {
        let (pa, tail) = self.position_parts(a, k_max)?;
        let (pb, _) = self.position_parts(b, k_max)?;
        let ca = self.circle_pos(a)?;
        let cb = self.circle_pos(b)?;
        let iv = interval_refine(&(&pa - &pb), bits);
        // Arcs beyond K that lie between the two angles add to the forward gap.
        Ok(if ca.theta > cb.theta {
            (iv.lo, iv.hi + tail)
        } else if ca.theta < cb.theta {
            (iv.lo - tail, iv.hi)
        } else {
            (iv.lo, iv.hi)
        })
    }
}

impl DynSystem for DenjoySystem {
    fn family(&self) -> String {
        "denjoy".into()
    }

    fn params(&self) -> serde_json::Value {
        serde_json::json!({ "n": self.n, "alpha": self.alpha.to_string(), "max_k": MAX_K })
    }

    fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Arc { i, .. } => *i < self.n,
            Point::Cantor { theta } => {
                theta >= &ExactScalar::zero() && theta < &ExactScalar::one() && self.orbit_index(theta).is_none()
            }
            _ => false,
        }
    }

    fn apply(&self, p: &Point) -> Result<Point> {
        self.require(p)?;
        Ok(match p {
            Point::Arc { k, i } => Point::Arc { k: k + 1, i: *i },
            Point::Cantor { theta } => Point::Cantor { theta: (theta + &self.alpha).fract() },
            _ => unreachable!(),
        })
    }

    fn apply_inverse(&self, p: &Point) -> Result<Point> {
        self.require(p)?;
        Ok(match p {
            Point::Arc { k, i } => Point::Arc { k: k - 1, i: *i },
            Point::Cantor { theta } => Point::Cantor { theta: (theta - &self.alpha).fract() },
            _ => unreachable!(),
        })
    }

    fn coord(&self, p: &Point) -> Result<Coord> {
        Ok(Coord::Circle(self.circle_pos(p)?))
    }

    fn metric(&self) -> MetricKind {
        MetricKind::CircleLength
    }

    fn distance(&self, a: &Point, b: &Point) -> Result<Distance> {
        if let (Point::Arc { k, i }, Point::Arc { k: k2, i: i2 }) = (a, b) {
            self.require(a)?;
            self.require(b)?;
            if k == k2 {
                let steps = (*i as i64 - *i2 as i64).abs();
                let d = arc_length(*k) * rat(steps, self.n as i64 - 1);
                return Ok(Distance::Exact(ExactScalar::rational(d)));
            }
        }
        if a == b {
            self.require(a)?;
            return Ok(Distance::Exact(ExactScalar::zero()));
        }
        let (lo, hi) = self.displacement(a, b, MAX_K, MAX_K)?;
        let (lo, hi) = circle_distance_bounds(&lo, &hi, &BigRational::from_integer(BigInt::from(2)));
        Ok(Distance::Bounded { lo, hi })
    }

    fn fast_coord(&self, p: &Point) -> Result<FastCoord> {
        let (base, tail) = self.position_parts(p, FAST_K)?;
        let iv = interval_refine(&base, FAST_BITS + 2);
        let iv = CertifiedInterval::new(iv.lo, iv.hi + tail);
        let pos = Fix::from_interval(&iv).ok_or_else(|| Error::Unrepresentable { point: p.to_string(), step: 0 })?;
        let circumference = (BigInt::one() << (FAST_BITS as usize + 1)).try_into().expect("fits in i128");
        Ok(FastCoord::Circle { pos, circumference })
    }

    fn is_countable(&self) -> bool {
        false
    }

    fn enumerate(&self, b: &IndexBounds) -> Result<Vec<Point>> {
        let mut out: Vec<Point> = (b.lo..=b.hi).flat_map(|k| (0..self.n).map(move |i| Point::Arc { k, i })).collect();
        out.extend(self.cantor_samples(b.samples));
        out.sort();
        Ok(out)
    }

    fn default_bounds(&self) -> IndexBounds {
        IndexBounds::symmetric(32, 0).with_samples(16)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_lengths() {
        assert_eq!(arc_length(0), rat(1, 3));
        assert_eq!(arc_length(-2), rat(1, 12));
        assert_eq!(arc_length(4), rat(1, 48));
        let total: BigRational = (-20..=20).map(arc_length).sum();
        assert_eq!(total, BigRational::one() - pow2(-19) / BigRational::from_integer(3.into()));
        for k in 0..30 {
            assert_eq!(arc_length(k + 1) * BigRational::from_integer(2.into()), arc_length(k));
            assert_eq!(arc_length(-k), arc_length(k));
        }
    }

    #[test]
    fn fibers() {
        assert!(build_denjoy(1).is_err());
        let d2 = build_denjoy(2).unwrap();
        assert_eq!(
            d2.distance(&Point::Arc { k: 0, i: 0 }, &Point::Arc { k: 0, i: 1 }).unwrap(),
            Distance::Exact(ExactScalar::ratio(1, 3))
        );
        let d3 = build_denjoy(3).unwrap();
        let mid = d3.distance(&Point::Arc { k: 0, i: 0 }, &Point::Arc { k: 0, i: 1 }).unwrap();
        assert_eq!(mid, Distance::Exact(ExactScalar::ratio(1, 6)));
        for k in -20..=20 {
            let d = d3.distance(&Point::Arc { k, i: 0 }, &Point::Arc { k, i: 2 }).unwrap();
            assert_eq!(d, Distance::Exact(ExactScalar::rational(arc_length(k))));
        }
    }

    #[test]
    fn map_moves_fibers_and_rotates() {
        let d = build_denjoy(3).unwrap();
        assert_eq!(d.apply(&Point::Arc { k: 0, i: 0 }).unwrap(), Point::Arc { k: 1, i: 0 });
        let c = d.cantor_samples(3)[2].clone();
        let Point::Cantor { theta } = &c else { panic!() };
        let Point::Cantor { theta: t2 } = d.apply(&c).unwrap() else { panic!() };
        assert_eq!(t2, (theta + d.alpha()).fract());
        for p in d.enumerate(&IndexBounds::symmetric(10, 0).with_samples(16)).unwrap() {
            assert_eq!(d.apply_inverse(&d.apply(&p).unwrap()).unwrap(), p);
        }
    }

    #[test]
    fn positions() {
        let d = build_denjoy(3).unwrap();
        let a0 = d.position(&Point::Arc { k: 0, i: 0 }, 20).unwrap();
        assert!(a0.lo <= BigRational::zero() && BigRational::zero() <= a0.hi);
        assert!(a0.width() <= pow2(-20));
        let b0 = d.position(&Point::Arc { k: 0, i: 2 }, 40).unwrap();
        let a0 = d.position(&Point::Arc { k: 0, i: 0 }, 40).unwrap();
        let gap = CertifiedInterval::new(&b0.lo - &a0.hi, &b0.hi - &a0.lo);
        assert!(gap.lo <= rat(1, 3) && rat(1, 3) <= gap.hi);
        assert!(matches!(d.position(&Point::Arc { k: 0, i: 0 }, 200), Err(Error::PrecisionUnreachable { .. })));
    }

    #[test]
    fn refinement_nests() {
        let d = build_denjoy(3).unwrap();
        let mut pts = d.cantor_samples(10);
        pts.extend((-5..5).map(|k| Point::Arc { k, i: 1 }));
        for p in pts {
            let mut prev = d.position(&p, 4).unwrap();
            for bits in 5..40 {
                let next = d.position(&p, bits).unwrap();
                assert!(next.width() <= pow2(-(bits as i64)));
                assert!(!(next.hi < prev.lo || next.lo > prev.hi), "{p} at {bits}");
                prev = next;
            }
        }
    }

    #[test]
    fn orbit_angles_normalize() {
        let d = build_denjoy(4).unwrap();
        let t3 = d.theta(3);
        assert_eq!(d.cantor_point(t3.clone(), Side::Minus).unwrap(), Point::Arc { k: 3, i: 0 });
        assert_eq!(d.cantor_point(t3.clone(), Side::Plus).unwrap(), Point::Arc { k: 3, i: 3 });
        assert!(d.cantor_point(t3, Side::Interior).is_err());
    }

    #[test]
    fn diameter_profile() {
        let prof = arc_diameter_profile(3, -3, -3);
        assert_eq!(prof[0].1, rat(1, 3));
        assert_eq!(arc_diameter_profile(0, 10, 10)[0].1, rat(1, 3072));
    }
}
