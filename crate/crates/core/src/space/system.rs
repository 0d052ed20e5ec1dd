use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::coord::{plane_distance, Coord, Distance, FastCoord, MetricKind};
use super::point::Point;
use super::scattered::ScatteredSpace;
use crate::error::{Error, Result};

/// Index window used to pick a finite sample of a system.
///
/// `lo..=hi` bounds the orbit index `j` (or `q` for the harmonic example,
/// `k` for Denjoy fibers); `depth` bounds construction levels or glued
/// components; `samples` is the number of extra samples (Denjoy Cantor points).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexBounds {
    pub lo: i64,
    pub hi: i64,
    #[serde(default)]
    pub depth: u32,
    #[serde(default)]
    pub samples: u32,
}

impl IndexBounds {
    pub fn new(lo: i64, hi: i64, depth: u32) -> Self {
        Self { lo, hi, depth, samples: 0 }
    }

    pub fn symmetric(r: i64, depth: u32) -> Self {
        Self::new(-r, r, depth)
    }

    pub fn empty() -> Self {
        Self::new(1, 0, 0)
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn with_samples(mut self, samples: u32) -> Self {
        self.samples = samples;
        self
    }

    pub fn contains(&self, j: i64) -> bool {
        self.lo <= j && j <= self.hi
    }
}

/// A homeomorphism on a described point set.
pub trait DynSystem: Send + Sync {
    /// CLI family name.
    fn family(&self) -> String;

    /// Builder parameters; together with `family` they rebuild the system.
    fn params(&self) -> serde_json::Value;

    fn contains(&self, p: &Point) -> bool;

    fn apply(&self, p: &Point) -> Result<Point>;

    fn apply_inverse(&self, p: &Point) -> Result<Point>;

    fn coord(&self, p: &Point) -> Result<Coord>;

    fn metric(&self) -> MetricKind {
        MetricKind::ChebyshevPlane
    }

    fn distance(&self, a: &Point, b: &Point) -> Result<Distance> {
        Ok(Distance::Exact(plane_distance(&self.coord(a)?, &self.coord(b)?)?))
    }

    fn fast_coord(&self, p: &Point) -> Result<FastCoord> {
        let c = self.coord(p)?;
        FastCoord::from_coord_plane(&c).ok_or_else(|| Error::Unrepresentable { point: p.to_string(), step: 0 })
    }

    fn is_countable(&self) -> bool {
        true
    }

    /// Points whose indices fall in the bounds, sorted by id order.
    fn enumerate(&self, bounds: &IndexBounds) -> Result<Vec<Point>>;

    fn default_bounds(&self) -> IndexBounds;

    fn space(&self) -> Option<&ScatteredSpace> {
        None
    }

    /// Exponent `k` when this is `T^k` of a base system.
    fn power(&self) -> i64 {
        1
    }

    fn require(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::UnknownPoint(p.to_string()))
        }
    }
}

pub type SystemRef = Arc<dyn DynSystem>;

/// `T^m x` for every `m` in `lo..=hi`.
pub fn orbit(sys: &dyn DynSystem, x: &Point, lo: i64, hi: i64) -> Result<Vec<Point>> {
    sys.require(x)?;
    if lo > hi {
        return Ok(Vec::new());
    }
    let mut cur = x.clone();
    if lo < 0 {
        for _ in 0..lo.unsigned_abs() {
            cur = sys.apply_inverse(&cur)?;
        }
    } else {
        for _ in 0..lo {
            cur = sys.apply(&cur)?;
        }
    }
    let mut out = Vec::with_capacity((hi - lo + 1) as usize);
    out.push(cur.clone());
    for _ in lo..hi {
        cur = sys.apply(&cur)?;
        out.push(cur.clone());
    }
    Ok(out)
}

/// The system `T^k` on the same space.
pub struct PowerSystem {
    base: SystemRef,
    k: i64,
}

pub fn power_system(sys: SystemRef, k: i64) -> Result<SystemRef> {
    if k == 0 {
        return Err(Error::InvalidArgument("power k must be nonzero".into()));
    }
    if k == 1 {
        return Ok(sys);
    }
    Ok(Arc::new(PowerSystem { base: sys, k }))
}

impl PowerSystem {
    fn step(&self, p: &Point, forward: bool) -> Result<Point> {
        let mut cur = p.clone();
        for _ in 0..self.k.unsigned_abs() {
            cur = if forward == (self.k > 0) { self.base.apply(&cur)? } else { self.base.apply_inverse(&cur)? };
        }
        Ok(cur)
    }

    pub fn base(&self) -> &SystemRef {
        &self.base
    }
}

impl DynSystem for PowerSystem {
    fn family(&self) -> String {
        self.base.family()
    }

    fn params(&self) -> serde_json::Value {
        let mut v = self.base.params();
        if let Some(obj) = v.as_object_mut() {
            obj.insert("power".into(), self.k.into());
        }
        v
    }

    fn contains(&self, p: &Point) -> bool {
        self.base.contains(p)
    }

    fn apply(&self, p: &Point) -> Result<Point> {
        self.step(p, true)
    }

    fn apply_inverse(&self, p: &Point) -> Result<Point> {
        self.step(p, false)
    }

    fn coord(&self, p: &Point) -> Result<Coord> {
        self.base.coord(p)
    }

    fn metric(&self) -> MetricKind {
        self.base.metric()
    }

    fn distance(&self, a: &Point, b: &Point) -> Result<Distance> {
        self.base.distance(a, b)
    }

    fn fast_coord(&self, p: &Point) -> Result<FastCoord> {
        self.base.fast_coord(p)
    }

    fn is_countable(&self) -> bool {
        self.base.is_countable()
    }

    fn enumerate(&self, bounds: &IndexBounds) -> Result<Vec<Point>> {
        self.base.enumerate(bounds)
    }

    fn default_bounds(&self) -> IndexBounds {
        self.base.default_bounds()
    }

    fn space(&self) -> Option<&ScatteredSpace> {
        self.base.space()
    }

    fn power(&self) -> i64 {
        self.k * self.base.power()
    }
}
