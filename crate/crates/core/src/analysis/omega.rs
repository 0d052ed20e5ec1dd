//! Non-wandering and multi-non-wandering points, and the transfinite `Ω` chain.
//!
//! Membership is certified by an explicit return found in a truncation;
//! non-membership only by the description: an isolated point whose orbit is
//! injective never comes back to its own neighbourhood `{x}`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{ExactScalar, OrdinalCnf};
use crate::space::{
    truncate, ClassId, Delta, Dynamics, IndexBounds, Point, Returns, ScatteredSpace, SystemRef, Truncation,
};

/// `T^{offset + t·k} witness ∈ B_ε(point)` for `t = 0..=d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReturnWitness {
    pub point: Point,
    pub witness: Point,
    pub offset: i64,
    pub k: u32,
    pub d: u32,
    pub hits: Vec<Point>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Escape {
    pub point: Point,
    pub class: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaReport {
    pub epsilon: ExactScalar,
    pub max_k: u32,
    pub d: u32,
    pub members: Vec<ReturnWitness>,
    pub nonmembers: Vec<Escape>,
    pub undecided: Vec<Point>,
}

/// Searches the truncation for an arithmetic-progression return to `B_ε(x)`
/// of length `d + 1` and step at most `max_k`, among the points `pool` allows.
pub fn find_return(
    tr: &Truncation,
    x: &Point,
    epsilon: &Delta,
    max_k: u32,
    d: u32,
    pool: &dyn Fn(&Point) -> bool,
) -> Result<Option<ReturnWitness>> {
    let xn = tr.node_of(x).ok_or_else(|| Error::UnknownPoint(x.to_string()))?;
    let mut ball = vec![false; tr.node_count()];
    for (n, b) in ball.iter_mut().enumerate() {
        *b = tr.nodes_within(n, xn, epsilon)?;
    }
    let h = i64::from(tr.horizon());
    let mut order: Vec<usize> = (0..tr.len()).filter(|&i| pool(&tr.points()[i])).collect();
    // the point itself first, so periodic points certify themselves
    if let Some(pos) = order.iter().position(|&i| &tr.points()[i] == x) {
        let own = order.remove(pos);
        order.insert(0, own);
    }
    for k in 1..=i64::from(max_k) {
        let span = k * i64::from(d);
        if span > 2 * h {
            break;
        }
        for &i in &order {
            for m0 in -h..=(h - span) {
                if (0..=i64::from(d)).all(|t| ball[tr.orbit_node(i, m0 + t * k)]) {
                    let hits =
                        (0..=i64::from(d)).map(|t| tr.node_point(tr.orbit_node(i, m0 + t * k)).clone()).collect();
                    return Ok(Some(ReturnWitness {
                        point: x.clone(),
                        witness: tr.points()[i].clone(),
                        offset: m0,
                        k: k as u32,
                        d,
                        hits,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Class ids of `s` that are isolated with injective orbits.
fn escaping(s: &ScatteredSpace) -> Result<Vec<bool>> {
    let ranks = s.class_ranks()?;
    Ok(s.classes.iter().zip(ranks).map(|(c, r)| r.is_zero() && c.dynamics == Dynamics::Orbit).collect())
}

fn scan(tr: &Truncation, epsilon: &ExactScalar, max_k: u32, d: u32) -> Result<OmegaReport> {
    if u64::from(d) * u64::from(max_k) > 2 * u64::from(tr.horizon()) {
        return Err(Error::InvalidArgument(format!(
            "d * max_k = {} exceeds the orbit window of the truncation",
            d * max_k
        )));
    }
    let delta = Delta::new(epsilon.clone())?;
    let space = tr.system().space();
    let esc = space.map(escaping).transpose()?;
    let mut rep = OmegaReport {
        epsilon: epsilon.clone(),
        max_k,
        d,
        members: Vec::new(),
        nonmembers: Vec::new(),
        undecided: Vec::new(),
    };
    for x in tr.points() {
        if let (Some(s), Some(esc)) = (space, &esc) {
            if let Some(c) = (s.class_of)(x) {
                if esc[c] {
                    rep.nonmembers.push(Escape {
                        point: x.clone(),
                        class: s.label(c).to_string(),
                        reason: "isolated point with injective orbit".into(),
                    });
                    continue;
                }
            }
        }
        match find_return(tr, x, &delta, max_k, d, &|_| true)? {
            Some(w) => rep.members.push(w),
            None => rep.undecided.push(x.clone()),
        }
    }
    Ok(rep)
}

pub fn nonwandering(tr: &Truncation, epsilon: &ExactScalar, max_k: u32) -> Result<OmegaReport> {
    scan(tr, epsilon, max_k, 1)
}

pub fn multi_nonwandering(tr: &Truncation, epsilon: &ExactScalar, max_k: u32, d: u32) -> Result<OmegaReport> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    scan(tr, epsilon, max_k, d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainMode {
    Wandering,
    Multi,
}

impl std::str::FromStr for ChainMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wandering" => Ok(ChainMode::Wandering),
            "multi" => Ok(ChainMode::Multi),
            _ => Err(Error::Parse(format!("unknown chain mode `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DepthParams {
    pub epsilon: ExactScalar,
    pub max_k: u32,
    /// Progression length checked for explicit witnesses in multi mode.
    pub d: u32,
    pub bounds: IndexBounds,
    pub horizon: u32,
}

impl Default for DepthParams {
    fn default() -> Self {
        Self { epsilon: ExactScalar::ratio(1, 4), max_k: 12, d: 3, bounds: IndexBounds::symmetric(12, 3), horizon: 40 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassEvidence {
    pub class: String,
    pub rule: String,
    pub witness: Option<ReturnWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaLevel {
    pub index: u32,
    pub classes: Vec<String>,
    pub retained: Vec<ClassEvidence>,
    pub removed: Vec<ClassEvidence>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaChain {
    pub mode: ChainMode,
    pub levels: Vec<OmegaLevel>,
    pub depth: OrdinalCnf,
    /// Classes of the stable set `Ω_depth`.
    pub center: Vec<String>,
}

/// Iterates `Ω` on the description. A class is kept when it is fixed,
/// periodic, or the target of a family whose orbits return unboundedly often
/// (every progression length `d` is met by a family winding more than `d`
/// times); it is dropped when it is isolated with injective orbits.
pub fn depth_chain(sys: &SystemRef, mode: ChainMode, params: &DepthParams) -> Result<OmegaChain> {
    let space = sys.space().ok_or_else(|| Error::InvalidArgument("depth chain needs a described space".into()))?;
    space.class_ranks()?;
    let tr = truncate(sys.clone(), &params.bounds, params.horizon)?;
    let delta = Delta::new(params.epsilon.clone())?;
    let d = match mode {
        ChainMode::Wandering => 1,
        ChainMode::Multi => params.d.max(1),
    };
    let mut keep = vec![true; space.classes.len()];
    let mut levels = Vec::new();
    let mut witnesses: BTreeMap<(ClassId, u32), Option<ReturnWitness>> = BTreeMap::new();
    for index in 0.. {
        let ids: Vec<ClassId> = (0..keep.len()).filter(|&c| keep[c]).collect();
        let cur = space.restrict(&keep, format!("Omega_{index}"));
        let ranks = cur.class_ranks()?;
        let mut retained = Vec::new();
        let mut removed = Vec::new();
        let mut undecided = Vec::new();
        let mut next = keep.clone();
        for (ci, &c) in ids.iter().enumerate() {
            let class = &cur.classes[ci];
            let winding = cur.families_into(ci).find(|f| f.returns == Returns::Unbounded).map(|f| f.label.clone());
            let rule = match (class.dynamics, winding) {
                (Dynamics::Fixed, _) => Some("fixed point".to_string()),
                (Dynamics::Periodic, _) => Some("periodic orbit".to_string()),
                (_, Some(f)) => Some(format!("family `{f}` returns unboundedly often")),
                _ => None,
            };
            if let Some(rule) = rule {
                let w = match tr.position(&class.sample) {
                    Some(_) => {
                        let keep_now = keep.clone();
                        let pool = |p: &Point| (space.class_of)(p).is_some_and(|pc| keep_now[pc]);
                        witnesses
                            .entry((c, index))
                            .or_insert(find_return(&tr, &class.sample, &delta, params.max_k, d, &pool)?)
                            .clone()
                    }
                    None => None,
                };
                retained.push(ClassEvidence { class: class.label.clone(), rule, witness: w });
            } else if ranks[ci].is_zero() && class.dynamics == Dynamics::Orbit {
                next[c] = false;
                removed.push(ClassEvidence {
                    class: class.label.clone(),
                    rule: "isolated point with injective orbit".into(),
                    witness: None,
                });
            } else {
                undecided.push(class.label.clone());
            }
        }
        if !undecided.is_empty() {
            return Err(Error::UndecidedLevel(undecided));
        }
        let labels: Vec<String> = cur.classes.iter().map(|c| c.label.clone()).collect();
        let done = removed.is_empty();
        levels.push(OmegaLevel { index, classes: labels.clone(), retained, removed });
        if done {
            return Ok(OmegaChain { mode, levels, depth: OrdinalCnf::finite(u64::from(index)), center: labels });
        }
        keep = next;
    }
    unreachable!("the class list is finite")
}

/// Classes of `Ω_k` for every level of the chain, as label sets.
pub fn chain_sets(chain: &OmegaChain) -> Vec<BTreeSet<String>> {
    chain.levels.iter().map(|l| l.classes.iter().cloned().collect()).collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::winding::{build_harmonic, build_winding_x2, standard_s, X2Params};

    fn x2() -> SystemRef {
        Arc::new(build_winding_x2(X2Params::new(2, Default::default())).unwrap())
    }

    #[test]
    fn shift_has_depth_one() {
        let s: SystemRef = Arc::new(standard_s());
        let p = DepthParams { bounds: IndexBounds::symmetric(4, 0), horizon: 8, ..Default::default() };
        let c = depth_chain(&s, ChainMode::Wandering, &p).unwrap();
        assert_eq!(c.depth, OrdinalCnf::finite(1));
        assert_eq!(c.center, vec!["s_inf".to_string()]);
    }

    #[test]
    fn x2_chain() {
        let sys = x2();
        for mode in [ChainMode::Wandering, ChainMode::Multi] {
            let c = depth_chain(&sys, mode, &DepthParams::default()).unwrap();
            assert_eq!(c.depth, OrdinalCnf::finite(2));
            let sets = chain_sets(&c);
            assert_eq!(sets[1], ["S".to_string(), "s_inf".to_string()].into());
            let s = c.levels[0].retained.iter().find(|e| e.class == "S").unwrap();
            let w = s.witness.as_ref().expect("explicit return for s_0");
            assert!(w.d >= 1);
        }
    }

    #[test]
    fn multi_return_for_s0() {
        let tr = truncate(x2(), &IndexBounds::symmetric(12, 3), 40).unwrap();
        let rep = multi_nonwandering(&tr, &ExactScalar::ratio(1, 4), 12, 3).unwrap();
        let w = rep.members.iter().find(|w| w.point == Point::S(0)).expect("s_0 is a member");
        assert_eq!(w.hits.len(), 4);
        assert!(matches!(w.witness, Point::Fam { .. }));
        assert!(rep.nonmembers.iter().any(|e| matches!(e.point, Point::Fam { .. })));
        assert!(rep.members.iter().any(|w| w.point == Point::SInf && w.k == 1));
    }

    #[test]
    fn harmonic_is_all_recurrent() {
        let h: SystemRef = Arc::new(build_harmonic());
        let p = DepthParams { bounds: IndexBounds::new(1, 15, 0), horizon: 8, ..Default::default() };
        let c = depth_chain(&h, ChainMode::Wandering, &p).unwrap();
        assert_eq!(c.depth, OrdinalCnf::zero());
    }
}
