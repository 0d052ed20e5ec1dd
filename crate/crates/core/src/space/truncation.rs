use std::collections::HashMap;

use super::coord::{Distance, FastCoord, Fix};
use super::point::Point;
use super::system::{IndexBounds, SystemRef};
use crate::error::{Error, Result};
use crate::exactnum::ExactScalar;

/// A distance threshold with its fixed-point enclosure precomputed.
#[derive(Clone, Debug)]
pub struct Delta {
    pub exact: ExactScalar,
    fix: Fix,
}

impl Delta {
    pub fn new(exact: ExactScalar) -> Result<Self> {
        let fix =
            Fix::exact_or_ulp(&exact).ok_or_else(|| Error::InvalidArgument(format!("delta {exact} out of range")))?;
        Ok(Self { exact, fix })
    }
}

/// A finite sample of a system with orbit segments `T^m x`, `|m| ≤ horizon`,
/// precomputed for every listed point.
pub struct Truncation {
    sys: SystemRef,
    points: Vec<Point>,
    horizon: u32,
    bounds: Option<IndexBounds>,
    nodes: Vec<Point>,
    fast: Vec<FastCoord>,
    index: HashMap<Point, usize>,
    orbits: Vec<Vec<usize>>,
}

pub fn truncate(sys: SystemRef, bounds: &IndexBounds, horizon: u32) -> Result<Truncation> {
    let points = if bounds.is_empty() { Vec::new() } else { sys.enumerate(bounds)? };
    let mut tr = Truncation::from_points(sys, points, horizon)?;
    tr.bounds = Some(*bounds);
    Ok(tr)
}

impl Truncation {
    pub fn from_points(sys: SystemRef, mut points: Vec<Point>, horizon: u32) -> Result<Self> {
        points.sort();
        points.dedup();
        let mut tr = Truncation {
            sys,
            points: Vec::new(),
            horizon,
            bounds: None,
            nodes: Vec::new(),
            fast: Vec::new(),
            index: HashMap::new(),
            orbits: Vec::new(),
        };
        for p in &points {
            tr.sys.require(p)?;
            let h = horizon as usize;
            let mut orbit = vec![0usize; 2 * h + 1];
            orbit[h] = tr.node(p, 0)?;
            let mut cur = p.clone();
            for m in 1..=h {
                cur = tr.sys.apply(&cur).map_err(|_| unrep(p, m as i64))?;
                orbit[h + m] = tr.node(&cur, m as i64).map_err(|_| unrep(p, m as i64))?;
            }
            let mut cur = p.clone();
            for m in 1..=h {
                cur = tr.sys.apply_inverse(&cur).map_err(|_| unrep(p, -(m as i64)))?;
                orbit[h - m] = tr.node(&cur, -(m as i64)).map_err(|_| unrep(p, -(m as i64)))?;
            }
            tr.orbits.push(orbit);
        }
        tr.points = points;
        Ok(tr)
    }

    fn node(&mut self, p: &Point, _step: i64) -> Result<usize> {
        if let Some(&i) = self.index.get(p) {
            return Ok(i);
        }
        if !self.sys.contains(p) {
            return Err(Error::UnknownPoint(p.to_string()));
        }
        let fc = self.sys.fast_coord(p)?;
        let i = self.nodes.len();
        self.nodes.push(p.clone());
        self.fast.push(fc);
        self.index.insert(p.clone(), i);
        Ok(i)
    }

    pub fn system(&self) -> &SystemRef {
        &self.sys
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    /// Index bounds the sample was enumerated with, if any.
    pub fn bounds(&self) -> Option<IndexBounds> {
        self.bounds
    }

    /// Number of distinct points met by the stored orbit segments.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_of(&self, p: &Point) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn position(&self, p: &Point) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    /// Node id of `T^m x_i`.
    pub fn orbit_node(&self, i: usize, m: i64) -> usize {
        self.orbits[i][(self.horizon as i64 + m) as usize]
    }

    pub fn node_point(&self, n: usize) -> &Point {
        &self.nodes[n]
    }

    pub fn orbit_points(&self, i: usize, lo: i64, hi: i64) -> Vec<Point> {
        (lo..=hi).map(|m| self.nodes[self.orbit_node(i, m)].clone()).collect()
    }

    /// Decides `d(node a, node b) ≤ delta`, escalating to exact arithmetic
    /// when the fixed-point enclosure straddles `delta`.
    pub fn nodes_within(&self, a: usize, b: usize, delta: &Delta) -> Result<bool> {
        if a == b {
            return Ok(true);
        }
        if let Some(fd) = self.fast[a].distance(&self.fast[b]) {
            if let Some(v) = fd.le(delta.fix) {
                return Ok(v);
            }
        }
        let (pa, pb) = (&self.nodes[a], &self.nodes[b]);
        self.sys.distance(pa, pb)?.within(&delta.exact).ok_or_else(|| Error::Undecided(pa.to_string(), pb.to_string()))
    }

    pub fn distance(&self, a: &Point, b: &Point) -> Result<Distance> {
        self.sys.distance(a, b)
    }
}

fn unrep(p: &Point, step: i64) -> Error {
    Error::Unrepresentable { point: p.to_string(), step }
}
