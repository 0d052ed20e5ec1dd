//! Containment `Γ_δ[x, T] ⊂ Γ_δ[x, T^k]` on a truncation.

use serde::Serialize;

use super::companions::{Mode, SeparationTable};
use crate::error::{Error, Result};
use crate::exactnum::ExactScalar;
use crate::space::{power_system, Delta, Point, Truncation};

#[derive(Clone, Debug, Serialize)]
pub struct PowerCheck {
    pub k: i64,
    pub delta: ExactScalar,
    pub horizon: u32,
    pub points: usize,
    /// `(x, y)` with `y` a `T`-companion of `x` but not a `T^k`-companion.
    pub violations: Vec<(Point, Point)>,
}

impl PowerCheck {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares two-sided companions under `T` at `horizon` with companions under
/// `T^k` at `⌊horizon/|k|⌋`, the latter computed on a fresh truncation of the
/// power system.
pub fn power_containment(tr: &Truncation, k: i64, delta: &ExactScalar, horizon: u32) -> Result<PowerCheck> {
    if k == 0 {
        return Err(Error::InvalidArgument("power k must be nonzero".into()));
    }
    let hk = horizon / k.unsigned_abs() as u32;
    let d = Delta::new(delta.clone())?;
    let base = SeparationTable::build(tr, &d, horizon, Mode::TwoSided)?;
    let ptr = Truncation::from_points(power_system(tr.system().clone(), k)?, tr.points().to_vec(), hk)?;
    let pow = SeparationTable::build(&ptr, &d, hk, Mode::TwoSided)?;
    let mut violations = Vec::new();
    for i in 0..tr.len() {
        for j in base.companions(i, horizon) {
            if pow.get(i, j) <= hk && i != j {
                violations.push((tr.points()[i].clone(), tr.points()[j].clone()));
            }
        }
    }
    Ok(PowerCheck { k, delta: delta.clone(), horizon, points: tr.len(), violations })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::space::{truncate, IndexBounds};
    use crate::winding::build_harmonic;

    #[test]
    fn harmonic_powers() {
        let tr = truncate(Arc::new(build_harmonic()), &IndexBounds::new(1, 31, 0), 6).unwrap();
        for k in [2, 3, -2] {
            let c = power_containment(&tr, k, &ExactScalar::ratio(1, 8), 6).unwrap();
            assert!(c.holds(), "{:?}", c.violations);
        }
        assert!(power_containment(&tr, 0, &ExactScalar::ratio(1, 8), 6).is_err());
    }
}
