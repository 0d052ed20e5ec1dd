//! Derived sets computed point by point on generated prefixes, as a check on
//! the structural ranks of a description.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::OrdinalCnf;
use crate::space::{Point, ScatteredSpace};

#[derive(Clone, Debug, Serialize)]
pub struct DerivedLevel {
    pub k: u32,
    pub schema: BTreeSet<String>,
    pub brute: BTreeSet<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivedComparison {
    pub prefix: usize,
    pub threshold: usize,
    pub levels: Vec<DerivedLevel>,
    pub agree: bool,
}

struct Brute<'a> {
    s: &'a ScatteredSpace,
    prefix: usize,
    threshold: usize,
    memo: HashMap<(Point, u32), bool>,
}

impl Brute<'_> {
    /// `x ∈ X^(k)` at prefix scale: some family into `x` has more than
    /// `threshold` of its first `prefix` members in `X^(k-1)`.
    fn survives(&mut self, x: &Point, k: u32) -> bool {
        if k == 0 {
            return true;
        }
        if let Some(&v) = self.memo.get(&(x.clone(), k)) {
            return v;
        }
        let mut ok = false;
        if let Some(c) = (self.s.class_of)(x) {
            let fams: Vec<usize> = (0..self.s.families.len()).filter(|&f| self.s.families[f].target == c).collect();
            'fams: for f in fams {
                let member = self.s.families[f].member.clone();
                let mut count = 0;
                for j in self.s.families[f].index.prefix(self.prefix) {
                    let Some(m) = member(x, j) else { continue };
                    if &m != x && self.survives(&m, k - 1) {
                        count += 1;
                        if count > self.threshold {
                            ok = true;
                            break 'fams;
                        }
                    }
                }
            }
        }
        self.memo.insert((x.clone(), k), ok);
        ok
    }
}

/// Compares `X^(k)` from structural ranks with the prefix computation for
/// every `k` up to one past the (finite) rank. A class survives the brute
/// computation when its sample point does.
pub fn compare_derived(s: &ScatteredSpace, prefix: usize) -> Result<DerivedComparison> {
    if prefix < 2 {
        return Err(Error::InvalidArgument("prefix must be at least 2".into()));
    }
    let rank = s.cb_rank()?;
    let top = rank.as_finite().ok_or_else(|| Error::InvalidArgument(format!("rank {rank} is not finite")))? as u32;
    let threshold = prefix / 2;
    let mut b = Brute { s, prefix, threshold, memo: HashMap::new() };
    let mut levels = Vec::new();
    for k in 0..=top + 1 {
        let schema = s.derived_labels(&OrdinalCnf::finite(u64::from(k)))?;
        let brute = s.classes.iter().filter(|c| b.survives(&c.sample, k)).map(|c| c.label.clone()).collect();
        levels.push(DerivedLevel { k, schema, brute });
    }
    let agree = levels.iter().all(|l| l.schema == l.brute);
    Ok(DerivedComparison { prefix, threshold, levels, agree })
}

/// Structural rank, cross-checked against iterated derived sets when finite.
pub fn cb_rank_checked(s: &ScatteredSpace) -> Result<OrdinalCnf> {
    let rank = s.cb_rank()?;
    if let Some(n) = rank.as_finite() {
        let n = n as u32;
        let at = s.derived_n(n)?;
        if at.is_empty() || !at.derived_set()?.is_empty() {
            return Err(Error::InvalidArgument(format!("iterated derived sets disagree with rank {rank}")));
        }
    }
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::DynSystem;
    use crate::winding::{build_tower, build_winding_x2, standard_s, TowerSpec, X2Params};

    #[test]
    fn shift_and_x2_agree() {
        let s = standard_s();
        let x2 = build_winding_x2(X2Params::new(2, Default::default())).unwrap();
        for sp in [s.space().unwrap(), x2.space().unwrap()] {
            for prefix in [20, 50] {
                let c = compare_derived(sp, prefix).unwrap();
                assert!(c.agree, "{:?}", c.levels);
            }
        }
        assert_eq!(cb_rank_checked(x2.space().unwrap()).unwrap(), OrdinalCnf::finite(2));
    }

    #[test]
    fn tower_agrees() {
        let t = build_tower(TowerSpec::new(OrdinalCnf::finite(3), 2)).unwrap();
        let c = compare_derived(t.space().unwrap(), 20).unwrap();
        assert!(c.agree, "{:?}", c.levels);
        assert_eq!(c.levels.len(), 5);
    }
}
