use std::sync::Arc;

use super::neighborhood::s_point_coord;
use crate::error::{Error, Result};
use crate::exactnum::ExactScalar;
use crate::space::{
    Coord, DynSystem, Dynamics, FamilySchema, IndexBounds, IndexDomain, Members, Point, PointClass, Returns,
    ScatteredSpace,
};

/// Coordinates of the points of `S`, shared by every winding construction.
pub fn s_coord_of(p: &Point) -> Option<Coord> {
    match p {
        Point::SInf => Some(Coord::plane(ExactScalar::zero(), ExactScalar::zero())),
        Point::S(i) => Some(s_point_coord(*i)),
        _ => None,
    }
}

pub(crate) fn s_classes() -> Vec<PointClass> {
    vec![
        PointClass { label: "s_inf".into(), sample: Point::SInf, dynamics: Dynamics::Fixed, single: true },
        PointClass { label: "S".into(), sample: Point::S(0), dynamics: Dynamics::Orbit, single: false },
    ]
}

/// `s_j → s_∞` as `|j| → ∞`, with class ids 1 → 0.
pub(crate) fn s_family() -> FamilySchema {
    FamilySchema {
        label: "S->s_inf".into(),
        members: Members::Class(1),
        target: 0,
        index: IndexDomain::Z,
        returns: Returns::None,
        coord: Some("(1/(|j|+1), sign(j)/(|j|+1))".into()),
        tail_text: "1/(n+1)".into(),
        tail: Arc::new(|n| ExactScalar::ratio(1, n as i64 + 1)),
        member: Arc::new(|_, j| Some(Point::S(j))),
        sample_target: Point::SInf,
    }
}

/// The shift `g(s_i) = s_{i+1}`, `g(s_∞) = s_∞`.
#[derive(Clone, Debug)]
pub struct StandardS {
    space: ScatteredSpace,
}

pub fn standard_s() -> StandardS {
    let space = ScatteredSpace {
        name: "S".into(),
        classes: s_classes(),
        families: vec![s_family()],
        class_of: Arc::new(|p| match p {
            Point::SInf => Some(0),
            Point::S(_) => Some(1),
            _ => None,
        }),
        coord: Arc::new(|p| s_coord_of(p).ok_or_else(|| Error::UnknownPoint(p.to_string()))),
    };
    StandardS { space }
}

pub(crate) fn shift(p: &Point, by: i64) -> Option<Point> {
    match p {
        Point::SInf => Some(Point::SInf),
        Point::S(i) => Some(Point::S(i + by)),
        _ => None,
    }
}

impl DynSystem for StandardS {
    fn family(&self) -> String {
        "standard-s".into()
    }

    fn params(&self) -> serde_json::Value {
        serde_json::json!({})
    }

    fn contains(&self, p: &Point) -> bool {
        matches!(p, Point::SInf | Point::S(_))
    }

    fn apply(&self, p: &Point) -> Result<Point> {
        shift(p, 1).ok_or_else(|| Error::UnknownPoint(p.to_string()))
    }

    fn apply_inverse(&self, p: &Point) -> Result<Point> {
        shift(p, -1).ok_or_else(|| Error::UnknownPoint(p.to_string()))
    }

    fn coord(&self, p: &Point) -> Result<Coord> {
        s_coord_of(p).ok_or_else(|| Error::UnknownPoint(p.to_string()))
    }

    fn enumerate(&self, b: &IndexBounds) -> Result<Vec<Point>> {
        let mut out = vec![Point::SInf];
        out.extend((b.lo..=b.hi).map(Point::S));
        out.sort();
        Ok(out)
    }

    fn default_bounds(&self) -> IndexBounds {
        IndexBounds::symmetric(16, 0)
    }

    fn space(&self) -> Option<&ScatteredSpace> {
        Some(&self.space)
    }
}
