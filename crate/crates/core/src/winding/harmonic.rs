use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactnum::ExactScalar;
use crate::space::{
    Coord, DynSystem, Dynamics, FamilySchema, IndexBounds, IndexDomain, Members, Point, PointClass, Returns,
    ScatteredSpace,
};

/// `{0} ∪ {1/q}` with `0` and `1` fixed and each block `[2^n, 2^{n+1})` of
/// denominators cycled.
#[derive(Clone, Debug)]
pub struct Harmonic {
    space: ScatteredSpace,
}

/// Block index `n` of `1/q`: `2^n ≤ q < 2^{n+1}`.
pub fn block_of(q: u64) -> u32 {
    63 - q.leading_zeros()
}

pub fn build_harmonic() -> Harmonic {
    let classes = vec![
        PointClass { label: "zero".into(), sample: Point::HarmonicZero, dynamics: Dynamics::Fixed, single: true },
        PointClass { label: "one".into(), sample: Point::Harmonic(1), dynamics: Dynamics::Fixed, single: true },
        PointClass { label: "blocks".into(), sample: Point::Harmonic(2), dynamics: Dynamics::Periodic, single: false },
    ];
    let fam = FamilySchema {
        label: "blocks->zero".into(),
        members: Members::Class(2),
        target: 0,
        index: IndexDomain::N,
        returns: Returns::None,
        coord: Some("1/(j+1)".into()),
        tail_text: "1/(n+1)".into(),
        tail: Arc::new(|n| ExactScalar::ratio(1, n as i64 + 1)),
        member: Arc::new(|_, j| (j >= 1).then(|| Point::Harmonic(j as u64 + 1))),
        sample_target: Point::HarmonicZero,
    };
    let space = ScatteredSpace {
        name: "harmonic".into(),
        classes,
        families: vec![fam],
        class_of: Arc::new(|p| match p {
            Point::HarmonicZero => Some(0),
            Point::Harmonic(1) => Some(1),
            Point::Harmonic(q) if *q > 1 => Some(2),
            _ => None,
        }),
        coord: Arc::new(harmonic_coord),
    };
    Harmonic { space }
}

fn harmonic_coord(p: &Point) -> Result<Coord> {
    match p {
        Point::HarmonicZero => Ok(Coord::plane(ExactScalar::zero(), ExactScalar::zero())),
        Point::Harmonic(q) if *q >= 1 && *q <= i64::MAX as u64 => {
            Ok(Coord::plane(ExactScalar::ratio(1, *q as i64), ExactScalar::zero()))
        }
        _ => Err(Error::UnknownPoint(p.to_string())),
    }
}

impl DynSystem for Harmonic {
    fn family(&self) -> String {
        "harmonic".into()
    }

    fn params(&self) -> serde_json::Value {
        serde_json::json!({})
    }

    fn contains(&self, p: &Point) -> bool {
        matches!(p, Point::HarmonicZero) || matches!(p, Point::Harmonic(q) if *q >= 1 && *q <= i64::MAX as u64)
    }

    fn apply(&self, p: &Point) -> Result<Point> {
        self.require(p)?;
        Ok(match *p {
            Point::Harmonic(q) if q > 1 => {
                let n = block_of(q);
                Point::Harmonic(if q + 1 == 1 << (n + 1) { 1 << n } else { q + 1 })
            }
            _ => p.clone(),
        })
    }

    fn apply_inverse(&self, p: &Point) -> Result<Point> {
        self.require(p)?;
        Ok(match *p {
            Point::Harmonic(q) if q > 1 => {
                let n = block_of(q);
                Point::Harmonic(if q == 1 << n { (1 << (n + 1)) - 1 } else { q - 1 })
            }
            _ => p.clone(),
        })
    }

    fn coord(&self, p: &Point) -> Result<Coord> {
        harmonic_coord(p)
    }

    /// `0` together with `1/q` for `q` in `[max(lo,1), hi]`.
    fn enumerate(&self, b: &IndexBounds) -> Result<Vec<Point>> {
        let mut out = vec![Point::HarmonicZero];
        out.extend((b.lo.max(1)..=b.hi).map(|q| Point::Harmonic(q as u64)));
        Ok(out)
    }

    fn default_bounds(&self) -> IndexBounds {
        IndexBounds::new(1, 63, 0)
    }

    fn space(&self) -> Option<&ScatteredSpace> {
        Some(&self.space)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::orbit;

    #[test]
    fn block_cycles() {
        let h = build_harmonic();
        assert_eq!(h.apply(&Point::Harmonic(2)).unwrap(), Point::Harmonic(3));
        assert_eq!(h.apply(&Point::Harmonic(3)).unwrap(), Point::Harmonic(2));
        assert_eq!(h.apply(&Point::Harmonic(1)).unwrap(), Point::Harmonic(1));
        assert_eq!(h.apply(&Point::HarmonicZero).unwrap(), Point::HarmonicZero);
        for n in 1..8u32 {
            let start = Point::Harmonic(1 << n);
            let o = orbit(&h, &start, 1, 1 << n).unwrap();
            assert_eq!(o.last(), Some(&start));
            assert!(o[..o.len() - 1].iter().all(|p| p != &start));
            assert_eq!(h.apply_inverse(&o[0]).unwrap(), start);
        }
    }
}
