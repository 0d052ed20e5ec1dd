use serde::Serialize;

use super::neighborhood::{Cell, NeighborhoodSystem};
use crate::error::{Error, Result};
use crate::space::{Coord, Point};

/// Evidence for "the sequence winds `d` times around `S` with respect to `V`".
///
/// Wind `J` occupies the indices `starts[J-1] + i`, `0 ≤ i ≤ 2r`, visiting
/// `U(s_{-r+i})`; every other index lies in `U(s_∞)`. `k` is the common gap
/// between consecutive starts when `uniform`, otherwise the smallest gap.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindingCertificate {
    pub r: u64,
    pub k: u64,
    pub d: u64,
    pub uniform: bool,
    pub starts: Vec<i64>,
    pub assignment: Vec<(i64, Cell)>,
}

impl WindingCertificate {
    /// Re-checks every clause against the raw sequence.
    pub fn verify(&self, seq: &[(i64, Coord)], v: &NeighborhoodSystem) -> Result<bool> {
        Ok(winding_number(seq, v)?.as_ref() == Some(self))
    }
}

/// Winding number of an indexed sequence prefix, or `None` when the visits
/// to the cells do not form complete ordered sweeps `s_{-r}, …, s_r`.
pub fn winding_number(seq: &[(i64, Coord)], v: &NeighborhoodSystem) -> Result<Option<WindingCertificate>> {
    let r = v.r as i64;
    let mut assignment = Vec::with_capacity(seq.len());
    for (m, c) in seq {
        match v.locate(c)? {
            Some(cell) => assignment.push((*m, cell)),
            None => {
                return Err(Error::AmbiguousWinding {
                    index: *m,
                    detail: format!("point {c:?} lies in no member of V_{}", v.r),
                })
            }
        }
    }
    let visits: Vec<(i64, i64)> = assignment
        .iter()
        .filter_map(|(m, c)| match c {
            Cell::S(u) => Some((*m, *u)),
            Cell::Inf => None,
        })
        .collect();
    let width = (2 * r + 1) as usize;
    if !visits.len().is_multiple_of(width) {
        return Ok(None);
    }
    let mut starts = Vec::new();
    for block in visits.chunks(width) {
        let b = block[0].0;
        let ordered = block.iter().enumerate().all(|(i, &(m, u))| m == b + i as i64 && u == -r + i as i64);
        if !ordered {
            return Ok(None);
        }
        starts.push(b);
    }
    let gaps: Vec<i64> = starts.windows(2).map(|w| w[1] - w[0]).collect();
    let uniform = gaps.windows(2).all(|g| g[0] == g[1]);
    let k = gaps.iter().copied().min().unwrap_or(2 * r + 2);
    if k <= 2 * r {
        return Ok(None);
    }
    Ok(Some(WindingCertificate { r: v.r, k: k as u64, d: starts.len() as u64, uniform, starts, assignment }))
}

/// Winding certificate of one orbit family, as emitted by a builder.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyCertificate {
    pub family: String,
    pub base: Point,
    /// The winding number the construction promises.
    pub label: u64,
    pub window: (i64, i64),
    pub certificate: WindingCertificate,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ExactScalar;
    use crate::winding::neighborhood::{make_neighborhood_system, s_point_coord};

    #[test]
    fn shift_orbit_winds_once() {
        let v = make_neighborhood_system(2).unwrap();
        let seq: Vec<(i64, Coord)> = (-10..=10).map(|m| (m, s_point_coord(m))).collect();
        let c = winding_number(&seq, &v).unwrap().unwrap();
        assert_eq!(c.d, 1);
        assert_eq!(c.starts, vec![-2]);
        assert!(c.verify(&seq, &v).unwrap());
    }

    #[test]
    fn constant_at_infinity() {
        let v = make_neighborhood_system(1).unwrap();
        let o = Coord::plane(ExactScalar::zero(), ExactScalar::zero());
        let seq: Vec<(i64, Coord)> = (0..5).map(|m| (m, o.clone())).collect();
        assert_eq!(winding_number(&seq, &v).unwrap().unwrap().d, 0);
    }

    #[test]
    fn broken_sweeps() {
        let v = make_neighborhood_system(1).unwrap();
        let seq: Vec<(i64, Coord)> =
            [1, 0, -1].iter().enumerate().map(|(m, &u)| (m as i64, s_point_coord(u))).collect();
        assert_eq!(winding_number(&seq, &v).unwrap(), None);
        let stray = vec![(0, Coord::plane(ExactScalar::ratio(1, 2), ExactScalar::zero()))];
        assert!(winding_number(&stray, &v).is_err());
    }
}
