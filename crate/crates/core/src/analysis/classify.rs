//! Expansiveness verdicts for a truncation. Verdicts describe the sample only.

use std::fmt;

use serde::Serialize;

use super::companions::{profile_from_table, Mode, ProfileRow, SeparationTable};
use crate::error::{Error, Result};
use crate::exactnum::ExactScalar;
use crate::space::{Delta, IndexBounds, Truncation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    NExpansive(usize),
    Aleph0,
    Unresolved,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NExpansive(n) => write!(f, "consistent-with-n-expansive({n})"),
            Verdict::Aleph0 => write!(f, "consistent-with-aleph0"),
            Verdict::Unresolved => write!(f, "unresolved"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaClass {
    pub delta: ExactScalar,
    pub profile: Vec<ProfileRow>,
    /// Same maximum and same witness members at the two largest horizons.
    pub stable: bool,
    /// Maximum over the sub-sample enumerated with halved bounds.
    pub half_max: Option<usize>,
    /// Points whose companion count is exactly the stabilized maximum.
    pub exact_witnesses: usize,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub mode: Mode,
    pub points: usize,
    pub deltas: Vec<DeltaClass>,
    /// Verdict at the smallest delta.
    pub verdict: Verdict,
}

fn halve(b: &IndexBounds) -> IndexBounds {
    IndexBounds { lo: b.lo / 2, hi: b.hi / 2, depth: b.depth, samples: b.samples / 2 }
}

/// Per-delta profile, stability and growth test. A maximum that grows when
/// the sample doubles is reported as `aleph0`; a stable non-growing maximum
/// `n` as `n-expansive(n)`.
pub fn classify_expansiveness(
    tr: &Truncation,
    deltas: &[ExactScalar],
    horizons: &[u32],
    mode: Mode,
) -> Result<Classification> {
    if deltas.is_empty() || horizons.is_empty() {
        return Err(Error::InvalidArgument("delta and horizon grids must be nonempty".into()));
    }
    if horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("horizons must be strictly increasing".into()));
    }
    let top = *horizons.last().expect("nonempty");
    let half_mask = match tr.bounds() {
        Some(b) if !b.is_empty() => {
            let sub = tr.system().enumerate(&halve(&b))?;
            let mut mask = vec![false; tr.len()];
            for p in sub {
                if let Some(i) = tr.position(&p) {
                    mask[i] = true;
                }
            }
            Some(mask)
        }
        _ => None,
    };
    let mut out = Vec::new();
    for delta in deltas {
        let table = SeparationTable::build(tr, &Delta::new(delta.clone())?, top, mode)?;
        let profile = profile_from_table(tr, &table, horizons);
        let stable = match profile.as_slice() {
            [.., a, b] => a.max_card == b.max_card && a.members == b.members,
            _ => false,
        };
        let max = profile.last().map_or(0, |r| r.max_card);
        let half_max = half_mask
            .as_ref()
            .map(|mask| (0..tr.len()).filter(|&i| mask[i]).map(|i| table.count_in(i, top, mask)).max().unwrap_or(0));
        let exact_witnesses = (0..tr.len()).filter(|&i| table.count(i, top) == max).count();
        let verdict = if !stable {
            Verdict::Unresolved
        } else if half_max.is_some_and(|h| h < max) {
            Verdict::Aleph0
        } else {
            Verdict::NExpansive(max)
        };
        out.push(DeltaClass { delta: delta.clone(), profile, stable, half_max, exact_witnesses, verdict });
    }
    let smallest = out.iter().min_by(|a, b| a.delta.cmp(&b.delta)).expect("nonempty");
    let verdict = smallest.verdict;
    Ok(Classification { mode, points: tr.len(), deltas: out, verdict })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::space::truncate;
    use crate::winding::{build_harmonic, standard_s};

    #[test]
    fn harmonic_grows() {
        let tr = truncate(Arc::new(build_harmonic()), &IndexBounds::new(1, 127, 0), 8).unwrap();
        let c = classify_expansiveness(&tr, &[ExactScalar::ratio(1, 8)], &[4, 8], Mode::TwoSided).unwrap();
        assert_eq!(c.verdict, Verdict::Aleph0);
        assert_eq!(c.deltas[0].profile[1].max_card, 1 + 8 + 16 + 32 + 64);
    }

    #[test]
    fn shift_is_expansive() {
        let tr = truncate(Arc::new(standard_s()), &IndexBounds::symmetric(6, 0), 12).unwrap();
        let c = classify_expansiveness(&tr, &[ExactScalar::ratio(1, 16)], &[10, 12], Mode::TwoSided).unwrap();
        assert_eq!(c.verdict, Verdict::NExpansive(1));
        assert!(classify_expansiveness(&tr, &[], &[1], Mode::Forward).is_err());
    }
}
