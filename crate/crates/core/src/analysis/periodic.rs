//! Fixed points, periodic points and converging semi-orbits.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::ExactScalar;
use crate::space::{Delta, Dynamics, Point, Truncation};

/// Least `p ≤ max` with `T^p x = x`.
fn period(tr: &Truncation, x: &Point, max: u32) -> Result<Option<u32>> {
    let sys = tr.system();
    let mut cur = x.clone();
    for p in 1..=max {
        cur = sys.apply(&cur)?;
        if &cur == x {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

pub fn fixed_points(tr: &Truncation) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for x in tr.points() {
        if period(tr, x, 1)?.is_some() {
            out.push(x.clone());
        }
    }
    Ok(out)
}

/// Minimal period ↦ points of the truncation with that period.
pub fn periodic_points(tr: &Truncation, max_period: u32) -> Result<BTreeMap<u32, Vec<Point>>> {
    if max_period == 0 {
        return Err(Error::InvalidArgument("max_period must be at least 1".into()));
    }
    let mut out: BTreeMap<u32, Vec<Point>> = BTreeMap::new();
    for x in tr.points() {
        if let Some(p) = period(tr, x, max_period)? {
            out.entry(p).or_default().push(x.clone());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SemiOrbit {
    pub point: Point,
    /// Fixed point approached by the backward tail.
    pub alpha: Point,
    /// Fixed point approached by the forward tail.
    pub omega: Point,
}

fn declared_periodic(tr: &Truncation, x: &Point) -> bool {
    tr.system()
        .space()
        .and_then(|s| (s.class_of)(x).map(|c| s.classes[c].dynamics == Dynamics::Periodic))
        .unwrap_or(false)
}

/// Points whose orbit tails `T^{±m} x`, `horizon/2 ≤ m ≤ horizon`, stay within
/// `tol` of a fixed point of the truncation. Non-fixed periodic points are
/// excluded since their tails do not settle, including those the description
/// declares periodic with a period beyond the horizon.
pub fn converging_semiorbits(tr: &Truncation, horizon: u32, tol: &ExactScalar) -> Result<Vec<SemiOrbit>> {
    if horizon > tr.horizon() {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} exceeds the truncation horizon {}",
            tr.horizon()
        )));
    }
    let fixed: Vec<(Point, usize)> = fixed_points(tr)?
        .into_iter()
        .map(|z| {
            let n = tr.node_of(&z).expect("truncation point has a node");
            (z, n)
        })
        .collect();
    let delta = Delta::new(tol.clone())?;
    let h = i64::from(horizon);
    let from = (h + 1) / 2;
    let mut out = Vec::new();
    for (i, x) in tr.points().iter().enumerate() {
        let fixed_here = fixed.iter().any(|(z, _)| z == x);
        if !fixed_here && (declared_periodic(tr, x) || period(tr, x, horizon)?.is_some()) {
            continue;
        }
        let settles = |sign: i64| -> Result<Option<Point>> {
            for (z, zn) in &fixed {
                let mut all = true;
                for m in from..=h {
                    if !tr.nodes_within(tr.orbit_node(i, sign * m), *zn, &delta)? {
                        all = false;
                        break;
                    }
                }
                if all {
                    return Ok(Some(z.clone()));
                }
            }
            Ok(None)
        };
        if let (Some(alpha), Some(omega)) = (settles(-1)?, settles(1)?) {
            out.push(SemiOrbit { point: x.clone(), alpha, omega });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::space::{truncate, IndexBounds};
    use crate::winding::{build_harmonic, standard_s};

    #[test]
    fn harmonic_cycles() {
        let tr = truncate(Arc::new(build_harmonic()), &IndexBounds::new(1, 63, 0), 8).unwrap();
        assert_eq!(fixed_points(&tr).unwrap(), vec![Point::HarmonicZero, Point::Harmonic(1)]);
        let per = periodic_points(&tr, 8).unwrap();
        assert_eq!(per[&4], (4..8).map(Point::Harmonic).collect::<Vec<_>>());
        assert_eq!(per[&8].len(), 8);
        let cs = converging_semiorbits(&tr, 8, &ExactScalar::ratio(1, 16)).unwrap();
        let pts: Vec<Point> = cs.iter().map(|c| c.point.clone()).collect();
        assert_eq!(pts, vec![Point::HarmonicZero, Point::Harmonic(1)]);
        assert_eq!(cs[0].alpha, Point::HarmonicZero);
    }

    #[test]
    fn shift_fixed_and_tails() {
        let tr = truncate(Arc::new(standard_s()), &IndexBounds::symmetric(5, 0), 40).unwrap();
        assert_eq!(fixed_points(&tr).unwrap(), vec![Point::SInf]);
        let per = periodic_points(&tr, 6).unwrap();
        assert_eq!(per.len(), 1);
        let cs = converging_semiorbits(&tr, 40, &ExactScalar::ratio(1, 8)).unwrap();
        assert_eq!(cs.len(), 12);
        assert!(cs.iter().all(|c| c.alpha == Point::SInf && c.omega == Point::SInf));
    }
}
