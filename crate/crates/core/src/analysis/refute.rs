//! Witnesses against positive `n`-expansiveness on countable spaces.

use serde::Serialize;

use super::companions::{profile_from_table, Mode, SeparationTable};
use crate::error::{Error, Result};
use crate::exactnum::ExactScalar;
use crate::space::{Delta, Point, Truncation};

#[derive(Clone, Debug, Serialize)]
pub struct RefutationRow {
    pub delta: ExactScalar,
    /// `None` means "not found at this truncation", never a positive claim.
    pub witness: Option<Point>,
    pub cardinality: usize,
    pub members: Vec<Point>,
}

/// For every delta, a point whose forward companion set exceeds `n` points.
pub fn refute_positive_n_expansiveness(
    tr: &Truncation,
    n: usize,
    deltas: &[ExactScalar],
    horizon: u32,
) -> Result<Vec<RefutationRow>> {
    let sys = tr.system();
    if !sys.is_countable() {
        return Err(Error::NotCountable(sys.family()));
    }
    deltas
        .iter()
        .map(|delta| {
            let table = SeparationTable::build(tr, &Delta::new(delta.clone())?, horizon, Mode::Forward)?;
            let row = profile_from_table(tr, &table, &[horizon]).pop();
            Ok(match row {
                Some(r) if r.max_card > n => RefutationRow {
                    delta: delta.clone(),
                    witness: Some(r.witness),
                    cardinality: r.max_card,
                    members: r.members,
                },
                r => RefutationRow {
                    delta: delta.clone(),
                    witness: None,
                    cardinality: r.map_or(0, |r| r.max_card),
                    members: Vec::new(),
                },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::denjoy::build_denjoy;
    use crate::space::{truncate, IndexBounds};
    use crate::winding::build_harmonic;

    #[test]
    fn harmonic_zero_has_many_companions() {
        let tr = truncate(Arc::new(build_harmonic()), &IndexBounds::new(1, 63, 0), 8).unwrap();
        let rows = refute_positive_n_expansiveness(&tr, 5, &[ExactScalar::ratio(1, 8)], 8).unwrap();
        assert_eq!(rows[0].witness, Some(Point::HarmonicZero));
        assert!(rows[0].cardinality >= 6);
    }

    #[test]
    fn denjoy_is_refused() {
        let d = Arc::new(build_denjoy(3).unwrap());
        let tr = truncate(d, &IndexBounds::symmetric(2, 0), 2).unwrap();
        let err = refute_positive_n_expansiveness(&tr, 3, &[ExactScalar::ratio(1, 8)], 2).unwrap_err();
        assert!(matches!(err, Error::NotCountable(_)));
    }
}
