use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::ExactScalar;
use crate::space::Coord;

/// `s_∞ = (0,0)`; `s_i = (1/(i+1), 1/(i+1))` for `i ≥ 0`, `(1/(|i|+1), −1/(|i|+1))` for `i < 0`.
pub fn s_coord(i: i64) -> (ExactScalar, ExactScalar) {
    let d = i.abs() + 1;
    let x = ExactScalar::ratio(1, d);
    let y = if i >= 0 { x.clone() } else { -x.clone() };
    (x, y)
}

pub fn s_point_coord(i: i64) -> Coord {
    let (x, y) = s_coord(i);
    Coord::plane(x, y)
}

/// Cell radius `1/(4(r+2)²)` shared by the default and nested systems.
pub fn cell_radius(r: u64) -> ExactScalar {
    let t = r as i64 + 2;
    ExactScalar::ratio(1, 4 * t * t)
}

/// Which member of a neighborhood system contains a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Cell {
    S(i64),
    Inf,
}

/// Closed Chebyshev balls `U(s_j)`, `|j| ≤ r`, of equal radius around the
/// points of `S`, and `U(s_∞)` of radius `rho` around the origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeighborhoodSystem {
    pub r: u64,
    pub radius: ExactScalar,
    pub rho: ExactScalar,
}

/// The default system: radius `1/(4(r+2)²)`, `rho = 1/(r+2)`.
pub fn make_neighborhood_system(r: u64) -> Result<NeighborhoodSystem> {
    if r < 1 {
        return Err(Error::InvalidArgument("neighborhood systems need r ≥ 1".into()));
    }
    let v = NeighborhoodSystem { r, radius: cell_radius(r), rho: ExactScalar::ratio(1, r as i64 + 2) };
    v.check()?;
    Ok(v)
}

impl NeighborhoodSystem {
    /// The member of a descending family used by the builders: same radii,
    /// `rho` halfway between `|s_{r+1}|` and `|s_r|`, so that `V_{r+1}` lies
    /// inside `V_r`.
    pub fn nested(r: u64) -> NeighborhoodSystem {
        let r1 = r as i64 + 1;
        NeighborhoodSystem { r, radius: cell_radius(r), rho: ExactScalar::ratio(2 * r1 + 1, 2 * r1 * (r1 + 1)) }
    }

    /// Verifies disjointness of all members and that every `s_i` with `|i| > r`
    /// lies in `U(s_∞)`.
    ///
    /// The centers sit on the two diagonals with norms decreasing in `|i|`, so
    /// the closest pairs are neighbours on one diagonal or mirror images
    /// across them, and the cell nearest to the origin is the outermost one.
    pub fn check(&self) -> Result<()> {
        let r = self.r as i64;
        let two_e = &self.radius + &self.radius;
        let (xr, _) = s_coord(r);
        if xr <= &self.rho + &self.radius {
            return Err(Error::Placement(format!("U(s_{r}) meets U(s_inf)")));
        }
        let apart = |i: i64, j: i64| {
            let ((xi, yi), (xj, yj)) = (s_coord(i), s_coord(j));
            std::cmp::max((&xi - &xj).abs(), (&yi - &yj).abs()) > two_e
        };
        for i in 0..=r {
            for (a, b) in [(i, i + 1), (-i - 1, -i - 2), (i, -i - 1), (i + 1, -i - 1)] {
                if a.abs() <= r && b.abs() <= r && a != b && !apart(a, b) {
                    return Err(Error::Placement(format!("U(s_{a}) meets U(s_{b})")));
                }
            }
        }
        // |s_i| = 1/(|i|+1) is decreasing in |i|, so the first outside index decides.
        let (x, _) = s_coord(r + 1);
        if x > self.rho {
            return Err(Error::Placement(format!("s_{} lies outside U(s_inf)", r + 1)));
        }
        Ok(())
    }

    /// `V_{next} ⊂ V_self` member by member.
    pub fn contains_system(&self, next: &NeighborhoodSystem) -> bool {
        if next.r < self.r || next.rho > self.rho || next.radius > self.radius {
            return false;
        }
        // cells of next beyond self.r must fit inside U(s_∞) of self
        (self.r as i64 + 1..=next.r as i64).all(|j| {
            let (x, _) = s_coord(j);
            &x + &next.radius <= self.rho
        })
    }

    /// The unique member containing `c`, or an error if it lies in none.
    pub fn locate(&self, c: &Coord) -> Result<Option<Cell>> {
        let (x, y) = c.as_plane().ok_or_else(|| Error::MixedCoordinates("circle".into(), "plane".into()))?;
        let norm = std::cmp::max(x.abs(), y.abs());
        if norm <= self.rho {
            return Ok(Some(Cell::Inf));
        }
        if x <= &ExactScalar::zero() {
            return Ok(None);
        }
        // only the cells whose centers have x-coordinate near x can qualify
        let q = x.recip().expect("x > 0").floor();
        let q: i64 = q.try_into().unwrap_or(i64::MAX / 2);
        let r = self.r as i64;
        let sign = if y >= &ExactScalar::zero() { 1 } else { -1 };
        for a in (q - 2).max(0)..=(q + 1).min(r) {
            for i in [sign * a, -sign * a] {
                let (sx, sy) = s_coord(i);
                if std::cmp::max((x - &sx).abs(), (y - &sy).abs()) <= self.radius {
                    return Ok(Some(Cell::S(i)));
                }
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_systems() {
        let v1 = make_neighborhood_system(1).unwrap();
        assert!(v1.check().is_ok());
        assert_eq!(v1.locate(&s_point_coord(0)).unwrap(), Some(Cell::S(0)));
        let v2 = make_neighborhood_system(2).unwrap();
        assert_eq!(v2.rho, ExactScalar::ratio(1, 4));
        assert_eq!(v2.locate(&s_point_coord(3)).unwrap(), Some(Cell::Inf));
        assert!(make_neighborhood_system(0).is_err());
        // the default formula puts s_{r+1} on the boundary of U(s_inf), so the
        // cell of s_{r+1} in the next system sticks out
        assert!(!v1.contains_system(&v2));
    }

    #[test]
    fn nested_family_descends() {
        for r in 1..30 {
            let a = NeighborhoodSystem::nested(r);
            let b = NeighborhoodSystem::nested(r + 1);
            assert!(a.check().is_ok() && b.check().is_ok());
            assert!(a.contains_system(&b), "r = {r}");
        }
    }
}
