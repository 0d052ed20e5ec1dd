//! Points, metrics, dynamical systems, truncations and scattered-space descriptions.

pub mod coord;
pub mod point;
pub mod scattered;
pub mod system;
pub mod truncation;

pub use coord::{plane_distance, CirclePos, Coord, Distance, FastCoord, Fix, MetricKind};
pub use point::Point;
pub use scattered::{
    validate_space, ClassId, Dynamics, FamilySchema, IndexDomain, Members, PointClass, Returns, ScatteredSpace,
    ValidationReport, Violation,
};
pub use system::{orbit, power_system, DynSystem, IndexBounds, PowerSystem, SystemRef};
pub use truncation::{truncate, Delta, Truncation};

use crate::error::{Error, Result};
use crate::exactnum::ExactScalar;

/// Symmetrized Hausdorff distance between two finite plane point sets.
pub fn hausdorff_distance(a: &[Coord], b: &[Coord]) -> Result<ExactScalar> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("Hausdorff distance needs nonempty sets".into()));
    }
    let directed = |from: &[Coord], to: &[Coord]| -> Result<ExactScalar> {
        let mut worst = ExactScalar::zero();
        for p in from {
            let mut best: Option<ExactScalar> = None;
            for q in to {
                let d = plane_distance(p, q)?;
                if best.as_ref().is_none_or(|b| d < *b) {
                    best = Some(d);
                }
            }
            worst = worst.max(best.expect("nonempty"));
        }
        Ok(worst)
    };
    Ok(directed(a, b)?.max(directed(b, a)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: i64, y: i64) -> Coord {
        Coord::plane(ExactScalar::integer(x), ExactScalar::integer(y))
    }

    #[test]
    fn hausdorff_examples() {
        let a = vec![pt(0, 0), pt(1, 1)];
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), ExactScalar::zero());
        assert_eq!(hausdorff_distance(&[pt(0, 0)], &[pt(1, 0)]).unwrap(), ExactScalar::one());
        assert!(hausdorff_distance(&[], &a).is_err());
    }
}
